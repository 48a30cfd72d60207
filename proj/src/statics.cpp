#include "plsrod/statics.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace plsrod {

namespace {

using Residual = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Damped Newton iteration on a square residual with central-difference
// Jacobian and step halving; fills the diagnostic fields of `result`.
// Residual evaluations that throw (e.g. degenerate cable tangents at wild
// trial points) count as rejected trials instead of propagating.
bool newton_solve(const Residual& residual, Eigen::VectorXd& y,
                  const StaticOptions& options, StaticResult& result) {
  const auto safe = [&residual](const Eigen::VectorXd& yy,
                                Eigen::VectorXd& out) {
    try {
      out = residual(yy);
      return out.allFinite();
    } catch (const std::exception&) {
      return false;
    }
  };

  Eigen::VectorXd r;
  if (!safe(y, r)) {
    result.message = "residual not evaluable at the initial guess";
    return false;
  }
  double rnorm = r.norm();
  result.residual_history.push_back(rnorm);
  const int n = static_cast<int>(y.size());

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (rnorm <= options.tolerance) {
      result.converged = true;
      result.iterations = iter;
      result.residual_norm = rnorm;
      return true;
    }
    Eigen::MatrixXd jac(n, n);
    bool jac_ok = true;
    for (int c = 0; c < n && jac_ok; ++c) {
      const double step = 1e-6 * std::max(1.0, std::abs(y[c]));
      Eigen::VectorXd yp = y;
      Eigen::VectorXd ym = y;
      yp[c] += step;
      ym[c] -= step;
      Eigen::VectorXd rp, rm;
      jac_ok = safe(yp, rp) && safe(ym, rm);
      if (jac_ok) jac.col(c) = (rp - rm) / (2.0 * step);
    }
    if (!jac_ok) {
      result.message = "residual not evaluable near the current iterate";
      result.iterations = iter;
      result.residual_norm = rnorm;
      return false;
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    result.condition_estimate = (smin > 0.0) ? smax / smin : INFINITY;
    if (!(smin > smax * 1e-14)) {
      result.message = "singular iteration matrix";
      result.iterations = iter;
      result.residual_norm = rnorm;
      return false;
    }
    const Eigen::VectorXd dy = svd.solve(r);

    double scale = 1.0;
    bool accepted = false;
    for (int half = 0; half < 12; ++half) {
      const Eigen::VectorXd trial = y - scale * dy;
      Eigen::VectorXd rt;
      if (safe(trial, rt) && rt.norm() < rnorm) {
        y = trial;
        r = rt;
        rnorm = rt.norm();
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    result.residual_history.push_back(rnorm);
    if (!accepted) {
      result.message = "line search stalled";
      result.iterations = iter + 1;
      result.residual_norm = rnorm;
      return false;
    }
  }
  result.message = "iteration limit reached";
  result.iterations = options.max_iterations;
  result.residual_norm = rnorm;
  result.converged = rnorm <= options.tolerance;
  return result.converged;
}

LoadCase scaled_loads(const LoadCase& loads, double s) {
  LoadCase out = loads;
  out.gravity *= s;
  out.tensions *= s;
  out.tip_wrench *= s;
  for (PointLoad& p : out.point_loads) {
    p.wrench *= s;
  }
  return out;
}

// Homotopy in the load amplitude: the load fraction advances with a step that
// halves whenever Newton stalls and regrows after successes, so sharply bent
// equilibria stay on the branch connected to the rest state.
bool ramp_solve(const std::function<Residual(const LoadCase&)>& residual,
                const LoadCase& loads, Eigen::VectorXd& y,
                const StaticOptions& options, StaticResult& staged) {
  double s = 0.0;
  double ds = 1.0 / std::max(1, options.continuation_steps);
  const double ds_min = 1.0 / 4096.0;
  while (s < 1.0) {
    const double target = std::min(1.0, s + ds);
    Eigen::VectorXd trial = y;
    StaticResult stage_result;
    if (newton_solve(residual(scaled_loads(loads, target)), trial, options,
                     stage_result)) {
      y = trial;
      s = target;
      staged.iterations += stage_result.iterations;
      staged.residual_norm = stage_result.residual_norm;
      staged.condition_estimate = stage_result.condition_estimate;
      if (s >= 1.0) {
        staged.residual_history = stage_result.residual_history;
      }
      ds = std::min(ds * 1.5, 0.5);
    } else {
      ds *= 0.5;
      if (ds < ds_min) {
        staged.message = "continuation stalled at load fraction " +
                         std::to_string(s) + ": " + stage_result.message;
        staged.residual_norm = stage_result.residual_norm;
        staged.residual_history = stage_result.residual_history;
        staged.condition_estimate = stage_result.condition_estimate;
        return false;
      }
    }
  }
  staged.converged = true;
  staged.message.clear();
  return true;
}

// Row scales for the reduced residual: interior rows repeat the allowed
// components per section, boundary rows once more.
Eigen::VectorXd reduced_row_scales(const Rod& rod,
                                   const ModeSelection& selection) {
  const Vector6d base = wrench_row_scales(rod);
  const int ni = selection.allowed_count();
  const int sections = rod.partition.section_count();
  Eigen::VectorXd scales(ni * (sections + 1));
  for (int blk = 0; blk <= sections; ++blk) {
    for (int r = 0; r < ni; ++r) {
      scales[ni * blk + r] = base[selection.allowed_rows[r]];
    }
  }
  return scales;
}

}  // namespace

Eigen::VectorXd static_residual(const Rod& rod, const CableSet& cables,
                                const LoadCase& loads,
                                const ModeSelection& selection,
                                const Eigen::VectorXd& q_reduced,
                                const Eigen::VectorXd& q_rest,
                                int quadrature_order) {
  loads.validate(cables, rod.length());
  const int ni = selection.allowed_count();
  const int sections = rod.partition.section_count();
  const Eigen::VectorXd q = lift(selection, q_reduced, q_rest);

  AssemblyOptions opts;
  opts.quadrature_order = quadrature_order;
  const AssemblyTable table = build_table(rod, q, nullptr, opts);

  Eigen::VectorXd generalized =
      internal_force(rod, table, q, nullptr, q_rest) +
      gravity_force(rod, table, loads.gravity) +
      point_load_force(rod, q, loads.point_loads);
  Vector6d tip_cable_pull = Vector6d::Zero();
  if (cables.count() > 0) {
    generalized += actuation_force(rod, cables, q, table, loads.tensions);
    tip_cable_pull =
        routing_matrix(cables, table.tip.strain, rod.length()) * loads.tensions;
  }
  if (!selection.is_full()) {
    // Wrench components suppressed by the reduction act as constraint loads;
    // their resultant enters through the tip transport.
    const Vector6d locked =
        selection.constrained *
        (selection.constrained.transpose() *
         Vector6d(loads.tip_wrench - tip_cable_pull));
    generalized += table.tip.jacobian.transpose() * locked;
  }

  const SectionMatrices tip_sm =
      section_matrices(rod.profile, rod.material, rod.length());
  const Vector6d boundary =
      tip_sm.stiffness.cwiseProduct(q.tail<6>() - q_rest.tail<6>()) +
      tip_cable_pull - loads.tip_wrench;

  Eigen::VectorXd residual(ni * (sections + 1));
  residual.head(ni * sections) = -reduce(selection, generalized).head(ni * sections);
  residual.tail(ni) = selection.allowed.transpose() * boundary;
  return residual.cwiseQuotient(reduced_row_scales(rod, selection));
}

Eigen::VectorXd tip_constrained_wrench(const Rod& rod, const CableSet& cables,
                                       const LoadCase& loads,
                                       const ModeSelection& selection,
                                       const Eigen::VectorXd& q) {
  loads.validate(cables, rod.length());
  Vector6d tip_cable_pull = Vector6d::Zero();
  if (cables.count() > 0) {
    tip_cable_pull = routing_matrix(cables, Vector6d(q.tail<6>()),
                                    rod.length()) *
                     loads.tensions;
  }
  return selection.constrained.transpose() *
         Vector6d(loads.tip_wrench - tip_cable_pull);
}

StaticResult solve_static(const Rod& rod, const CableSet& cables,
                          const LoadCase& loads,
                          const ModeSelection& selection,
                          const Eigen::VectorXd& q_rest,
                          const Eigen::VectorXd* q_guess,
                          const StaticOptions& options) {
  const int sections = rod.partition.section_count();
  const int ni = selection.allowed_count();
  const int n = ni * (sections + 1);

  Eigen::VectorXd y = (q_guess != nullptr) ? *q_guess : reduce(selection, q_rest);
  if (y.size() != n) {
    throw std::invalid_argument("solve_static: guess has wrong size");
  }

  const auto residual = [&](const LoadCase& lc) {
    return [&rod, &cables, lc, &selection, &q_rest,
            &options](const Eigen::VectorXd& yy) {
      return static_residual(rod, cables, lc, selection, yy, q_rest,
                             options.quadrature_order);
    };
  };

  StaticResult result;
  if (newton_solve(residual(loads), y, options, result)) {
    result.q_reduced = y;
    result.q = lift(selection, y, q_rest);
    return result;
  }
  if (!options.allow_continuation) {
    result.q_reduced = y;
    result.q = lift(selection, y, q_rest);
    return result;
  }

  // Retry from rest, ramping all loads up in stages.
  StaticResult staged;
  staged.used_continuation = true;
  staged.message = result.message;
  y = reduce(selection, q_rest);
  ramp_solve(residual, loads, y, options, staged);
  staged.q_reduced = y;
  staged.q = lift(selection, y, q_rest);
  return staged;
}

std::vector<StaticResult> solve_sweep(const Rod& rod, const CableSet& cables,
                                      const std::vector<LoadCase>& cases,
                                      const ModeSelection& selection,
                                      const Eigen::VectorXd& q_rest,
                                      const StaticOptions& options) {
  std::vector<StaticResult> results;
  results.reserve(cases.size());
  const Eigen::VectorXd* guess = nullptr;
  for (const LoadCase& lc : cases) {
    results.push_back(
        solve_static(rod, cables, lc, selection, q_rest, guess, options));
    guess = &results.back().q_reduced;
  }
  return results;
}

Eigen::VectorXd pcs_static_residual(const Rod& rod, const CableSet& cables,
                                    const LoadCase& loads,
                                    const Eigen::VectorXd& q_pcs,
                                    int quadrature_order) {
  loads.validate(cables, rod.length());
  const int sections = rod.partition.section_count();
  if (q_pcs.size() != 6 * sections) {
    throw std::invalid_argument("pcs_static_residual: q has wrong size");
  }
  const QuadratureGrid grid = quadrature_grid(rod.partition, quadrature_order);
  const Vector6d base_gravity =
      adjoint_inverse(rod.base_pose) * loads.gravity;

  // Constant-strain sections carry constant cross-section properties, sampled
  // at the section midpoint; a tapered rod becomes a stack of cylinders.
  std::vector<SectionMatrices> mid(sections);
  for (int nsec = 0; nsec < sections; ++nsec) {
    const double xm = 0.5 * (rod.partition.bounds[nsec] +
                             rod.partition.bounds[nsec + 1]);
    mid[nsec] = section_matrices(rod.profile, rod.material, xm);
  }

  Eigen::VectorXd r = Eigen::VectorXd::Zero(6 * sections);
  for (std::size_t i = 0; i < grid.abscissae.size(); ++i) {
    const double x = grid.abscissae[i];
    const double w = grid.weights[i];
    const InterpWeights iw = interp_weights(rod.partition, x);
    const Vector6d xi = q_pcs.segment<6>(6 * iw.section);
    const SectionMatrices& sm = mid[iw.section];

    // Elastic + cable wrench resisted by this section's test direction.
    Vector6d wrench = sm.stiffness.cwiseProduct(xi - rod.rest_strain);
    if (cables.count() > 0) {
      wrench += routing_matrix(cables, xi, x) * loads.tensions;
    }
    r.segment<6>(6 * iw.section) += w * wrench;

    // Distributed gravity mapped through the velocity map.
    const Eigen::MatrixXd jac = pcs_strain_jacobian(rod, q_pcs, x);
    const Pose pose = pcs_pose_at(rod, q_pcs, x);
    const Vector6d grav =
        sm.inertia.cwiseProduct(adjoint_inverse(pose) * base_gravity);
    r.noalias() -= w * (jac.transpose() * grav);
  }

  const Eigen::MatrixXd tip_jac =
      pcs_strain_jacobian(rod, q_pcs, rod.length());
  r.noalias() -= tip_jac.transpose() * loads.tip_wrench;

  for (const PointLoad& load : loads.point_loads) {
    const Eigen::MatrixXd jac = pcs_strain_jacobian(rod, q_pcs, load.x);
    r.noalias() -= jac.transpose() * load.wrench;
  }

  const Vector6d scales = wrench_row_scales(rod);
  for (int nsec = 0; nsec < sections; ++nsec) {
    r.segment<6>(6 * nsec) = r.segment<6>(6 * nsec).cwiseQuotient(scales);
  }
  return r;
}

StaticResult solve_static_pcs(const Rod& rod, const CableSet& cables,
                              const LoadCase& loads,
                              const Eigen::VectorXd* q_guess,
                              const StaticOptions& options) {
  const int sections = rod.partition.section_count();
  Eigen::VectorXd y(6 * sections);
  if (q_guess != nullptr) {
    y = *q_guess;
  } else {
    for (int nsec = 0; nsec < sections; ++nsec) {
      y.segment<6>(6 * nsec) = rod.rest_strain;
    }
  }

  const auto residual = [&](const LoadCase& lc) {
    return [&rod, &cables, lc, &options](const Eigen::VectorXd& yy) {
      return pcs_static_residual(rod, cables, lc, yy,
                                 options.quadrature_order);
    };
  };

  StaticResult result;
  if (newton_solve(residual(loads), y, options, result)) {
    result.q_reduced = y;
    result.q = y;
    return result;
  }
  if (!options.allow_continuation) {
    result.q = y;
    result.q_reduced = y;
    return result;
  }
  StaticResult staged;
  staged.used_continuation = true;
  for (int nsec = 0; nsec < sections; ++nsec) {
    y.segment<6>(6 * nsec) = rod.rest_strain;
  }
  ramp_solve(residual, loads, y, options, staged);
  staged.q = y;
  staged.q_reduced = y;
  return staged;
}

}  // namespace plsrod
