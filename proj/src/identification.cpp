#include "plsrod/identification.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <utility>

#include <Eigen/QR>

#include "plsrod/kinematics.hpp"
#include "plsrod/reduction.hpp"

namespace plsrod {

namespace {

// Below this tip error (m) the distance gradient is treated as linear so the
// fit stays smooth through exact data.
constexpr double kDistanceSmoothing = 1e-6;

Eigen::Vector3d log_lower(const MaterialBounds& b) {
  return {std::log(b.young_min), std::log(b.shear_min), std::log(b.density_min)};
}

Eigen::Vector3d log_upper(const MaterialBounds& b) {
  return {std::log(b.young_max), std::log(b.shear_max), std::log(b.density_max)};
}

Eigen::Vector3d clamp_box(const Eigen::Vector3d& z, const MaterialBounds& b) {
  return z.cwiseMax(log_lower(b)).cwiseMin(log_upper(b));
}

Eigen::Vector3d exp_params(const Eigen::Vector3d& z) {
  return z.array().exp();
}

}  // namespace

Rod with_material(const Rod& rod, double young_modulus, double shear_modulus,
                  double density) {
  Rod out = rod;
  out.material.young_modulus = young_modulus;
  out.material.shear_modulus = shear_modulus;
  out.material.density = density;
  out.material.validate();
  return out;
}

TipFitProblem::TipFitProblem(Rod rod, CableSet cables, Vector6d gravity,
                             std::vector<Experiment> experiments,
                             StaticOptions options,
                             Eigen::Vector3d tip_marker)
    : rod_(std::move(rod)),
      cables_(std::move(cables)),
      gravity_(gravity),
      experiments_(std::move(experiments)),
      options_(options),
      tip_marker_(std::move(tip_marker)) {
  rod_.validate();
  cables_.validate();
  if (experiments_.empty())
    throw std::invalid_argument("tip fit needs at least one experiment");
  for (const auto& exp : experiments_) {
    if (exp.tensions.size() != cables_.count())
      throw std::invalid_argument("experiment tension count mismatch");
  }
  warm_starts_.resize(experiments_.size());
  equilibria_.resize(experiments_.size());
}

TipFitProblem::Evaluation TipFitProblem::evaluate(const Eigen::Vector3d& theta) {
  Evaluation ev;
  const int m = experiment_count();
  ev.residuals.setZero(3 * m);
  ev.tips.reserve(m);

  const Rod rod = with_material(rod_, theta[0], theta[1], theta[2]);
  const ModeSelection full = make_selection("full");
  const Eigen::VectorXd q_rest = straight_configuration(rod);

  for (int i = 0; i < m; ++i) {
    LoadCase loads;
    loads.gravity = gravity_;
    loads.tensions = experiments_[i].tensions;

    const Eigen::VectorXd* guess =
        warm_starts_[i].size() ? &warm_starts_[i] : nullptr;
    StaticResult res =
        solve_static(rod, cables_, loads, full, q_rest, guess, options_);
    if (!res.converged && guess != nullptr)
      res = solve_static(rod, cables_, loads, full, q_rest, nullptr, options_);
    if (!res.converged) return ev;

    warm_starts_[i] = res.q_reduced;
    equilibria_[i] = res.q;

    const Pose tip_pose = rod.base_pose * pose_at(rod, res.q, rod.length());
    const Eigen::Vector3d point =
        tip_pose.translation + tip_pose.rotation * tip_marker_;
    const Eigen::Vector3d err = point - experiments_[i].tip;
    ev.tips.push_back(point);
    ev.residuals.segment<3>(3 * i) = err;
    ev.objective += err.norm();
  }
  ev.ok = true;
  return ev;
}

namespace {

struct LmRun {
  IdentificationResult result;
  Eigen::Vector3d z = Eigen::Vector3d::Zero();
};

LmRun run_levenberg(TipFitProblem& problem, const Eigen::Vector3d& z_init,
                    const IdentifyOptions& options) {
  LmRun run;
  IdentificationResult& out = run.result;
  const int m = problem.experiment_count();
  const double fd_step = 1e-3;  // in the log parameters

  Eigen::Vector3d z = clamp_box(z_init, options.bounds);
  auto current = problem.evaluate(exp_params(z));
  if (!current.ok) {
    out.objective_initial = std::numeric_limits<double>::infinity();
    out.objective = out.objective_initial;
    out.message = "equilibrium solve failed at the initial parameters";
    run.z = z;
    return run;
  }
  out.objective_initial = current.objective;

  double lambda = 1e-3;
  int iterations = 0;
  std::string message = "iteration limit reached";
  bool converged = false;

  for (; iterations < options.max_iterations; ++iterations) {
    if (current.objective <= 1e-14) {
      message = "objective vanished";
      converged = true;
      break;
    }

    // Central differences of the stacked tip residuals in the log parameters.
    Eigen::MatrixXd jac(3 * m, 3);
    bool jac_ok = true;
    for (int p = 0; p < 3 && jac_ok; ++p) {
      Eigen::Vector3d zp = z, zm = z;
      zp[p] += fd_step;
      zm[p] -= fd_step;
      const auto plus = problem.evaluate(exp_params(zp));
      const auto minus = problem.evaluate(exp_params(zm));
      jac_ok = plus.ok && minus.ok;
      if (jac_ok)
        jac.col(p) = (plus.residuals - minus.residuals) / (2.0 * fd_step);
    }
    if (!jac_ok) {
      message = "equilibrium solve failed while probing the gradient";
      break;
    }

    // Reweight so the quadratic model tracks the summed distances.
    Eigen::VectorXd weighted = current.residuals;
    Eigen::MatrixXd jac_w = jac;
    for (int i = 0; i < m; ++i) {
      const double norm = current.residuals.segment<3>(3 * i).norm();
      const double w = 1.0 / std::sqrt(std::max(norm, kDistanceSmoothing));
      weighted.segment<3>(3 * i) *= w;
      jac_w.middleRows<3>(3 * i) *= w;
    }
    const Eigen::Matrix3d normal = jac_w.transpose() * jac_w;
    const Eigen::Vector3d gradient = jac_w.transpose() * weighted;

    bool accepted = false;
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::Matrix3d damped = normal;
      damped.diagonal() += lambda * normal.diagonal().cwiseMax(1e-30);
      const Eigen::Vector3d step = damped.ldlt().solve(-gradient);
      const Eigen::Vector3d z_new = clamp_box(z + step, options.bounds);
      const auto candidate = problem.evaluate(exp_params(z_new));
      if (candidate.ok && candidate.objective < current.objective) {
        const double drop = current.objective - candidate.objective;
        const double moved = (z_new - z).norm();
        z = z_new;
        current = candidate;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (moved <= options.step_tolerance) {
          message = "step below tolerance";
          converged = true;
        } else if (drop <= options.objective_tolerance *
                               std::max(current.objective, 1e-300)) {
          message = "objective stagnated";
          converged = true;
        }
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
    if (converged) {
      ++iterations;
      break;
    }
    if (!accepted) {
      message = "no further decrease";
      converged = true;
      ++iterations;
      break;
    }
  }

  const Eigen::Vector3d theta = exp_params(z);
  out.young_modulus = theta[0];
  out.shear_modulus = theta[1];
  out.density = theta[2];
  out.objective = current.objective;
  out.iterations = iterations;
  out.converged = converged;
  out.message = message;
  out.model_tips = current.tips;
  run.z = z;
  return run;
}

}  // namespace

IdentificationResult identify(const Rod& rod, const CableSet& cables,
                              const Vector6d& gravity,
                              const std::vector<Experiment>& experiments,
                              const Eigen::Vector3d& theta_init,
                              const IdentifyOptions& options) {
  if ((theta_init.array() <= 0.0).any())
    throw std::invalid_argument("material parameters must be positive");

  TipFitProblem problem(rod, cables, gravity, experiments,
                        options.static_options, options.tip_marker);
  const Eigen::Vector3d z0 = theta_init.array().log();

  LmRun best = run_levenberg(problem, z0, options);
  const double primary_initial = best.result.objective_initial;

  if (options.multistart > 0) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Eigen::Vector3d lo = log_lower(options.bounds);
    const Eigen::Vector3d hi = log_upper(options.bounds);
    for (int k = 0; k < options.multistart; ++k) {
      Eigen::Vector3d z;
      for (int p = 0; p < 3; ++p) z[p] = lo[p] + (hi[p] - lo[p]) * unit(rng);
      LmRun candidate = run_levenberg(problem, z, options);
      if (candidate.result.objective < best.result.objective) best = candidate;
    }
  }

  best.result.objective_initial = primary_initial;
  return best.result;
}

ValidationReport validate_tips(const Rod& rod, const CableSet& cables,
                               const Vector6d& gravity,
                               const std::vector<Experiment>& experiments,
                               const Eigen::Vector3d& theta,
                               const StaticOptions& options,
                               const Eigen::Vector3d& tip_marker) {
  TipFitProblem problem(rod, cables, gravity, experiments, options,
                        tip_marker);
  const auto ev = problem.evaluate(theta);
  if (!ev.ok)
    throw std::runtime_error("equilibrium solve failed during validation");

  ValidationReport report;
  report.model_tips = ev.tips;
  report.errors.reserve(ev.tips.size());
  for (int i = 0; i < problem.experiment_count(); ++i) {
    const double err = ev.residuals.segment<3>(3 * i).norm();
    report.errors.push_back(err);
    report.max_error = std::max(report.max_error, err);
    report.mean_error += err;
  }
  report.mean_error /= static_cast<double>(report.errors.size());
  return report;
}

KktReport kkt_residual(TipFitProblem& problem, const Eigen::Vector3d& theta) {
  const auto base = problem.evaluate(theta);
  if (!base.ok)
    throw std::runtime_error("equilibrium solve failed during the optimality check");

  const Rod rod = with_material(problem.rod(), theta[0], theta[1], theta[2]);
  const ModeSelection full = make_selection("full");
  const Eigen::VectorXd q_rest = straight_configuration(rod);
  const int quadrature = problem.options().quadrature_order;
  const Eigen::Vector3d z = theta.array().log();
  const double hz = 1e-4;

  KktReport report;
  Eigen::Vector3d accumulated = Eigen::Vector3d::Zero();

  for (int i = 0; i < problem.experiment_count(); ++i) {
    LoadCase loads;
    loads.gravity = problem.gravity();
    loads.tensions = problem.experiments()[i].tensions;

    const Eigen::VectorXd& q = problem.equilibria()[i];
    const int dof = static_cast<int>(q.size());

    const Eigen::VectorXd residual =
        static_residual(rod, problem.cables(), loads, full, q, q_rest, quadrature);
    report.constraint_norm = std::max(report.constraint_norm, residual.norm());

    // Equilibrium Jacobian in the node strains, by central differences.
    Eigen::MatrixXd constraint_jac(dof, dof);
    for (int j = 0; j < dof; ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(q[j]));
      Eigen::VectorXd qp = q, qm = q;
      qp[j] += h;
      qm[j] -= h;
      constraint_jac.col(j) =
          (static_residual(rod, problem.cables(), loads, full, qp, q_rest,
                           quadrature) -
           static_residual(rod, problem.cables(), loads, full, qm, q_rest,
                           quadrature)) /
          (2.0 * h);
    }

    // Distance gradient through the marker position: the pose perturbation
    // along a coordinate is the body twist given by the strain Jacobian
    // column, and the marker rides on the tip frame with a lever arm.
    const Pose tip_body = pose_at(rod, q, rod.length());
    const Pose tip_world = rod.base_pose * tip_body;
    const Eigen::Matrix3d rot = tip_world.rotation;
    const Eigen::MatrixXd tip_jac = strain_jacobian(rod, q, rod.length());
    const Eigen::MatrixXd point_jac =
        tip_jac.bottomRows(3) -
        skew(problem.tip_marker()) * tip_jac.topRows(3);
    const Eigen::Vector3d err = base.residuals.segment<3>(3 * i);
    const Eigen::Vector3d direction =
        err / std::max(err.norm(), kDistanceSmoothing);
    const Eigen::VectorXd grad_q =
        point_jac.transpose() * (rot.transpose() * direction);

    const Eigen::VectorXd multiplier =
        constraint_jac.transpose().colPivHouseholderQr().solve(-grad_q);

    // Constraint sensitivity to the log parameters at frozen strains.
    Eigen::MatrixXd param_jac(dof, 3);
    for (int p = 0; p < 3; ++p) {
      Eigen::Vector3d zp = z, zm = z;
      zp[p] += hz;
      zm[p] -= hz;
      const Eigen::Vector3d tp = zp.array().exp();
      const Eigen::Vector3d tm = zm.array().exp();
      const Rod rod_p = with_material(rod, tp[0], tp[1], tp[2]);
      const Rod rod_m = with_material(rod, tm[0], tm[1], tm[2]);
      param_jac.col(p) =
          (static_residual(rod_p, problem.cables(), loads, full, q, q_rest,
                           quadrature) -
           static_residual(rod_m, problem.cables(), loads, full, q, q_rest,
                           quadrature)) /
          (2.0 * hz);
    }

    const Eigen::Vector3d term = param_jac.transpose() * multiplier;
    accumulated += term;
    report.stationarity_scale += term.norm();
  }

  report.stationarity = accumulated.norm();
  return report;
}

}  // namespace plsrod
