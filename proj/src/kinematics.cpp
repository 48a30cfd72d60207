#include "plsrod/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace plsrod {

std::vector<SegmentSpan> build_segments(const Partition& partition) {
  partition.validate();
  const int k = partition.segments_per_section;
  std::vector<SegmentSpan> out;
  out.reserve(static_cast<std::size_t>(k) * partition.section_count());
  for (int n = 0; n < partition.section_count(); ++n) {
    const double left = partition.bounds[n];
    const double len = partition.section_length(n);
    const double dx = len / k;
    for (int i = 0; i < k; ++i) {
      SegmentSpan s;
      s.section = n;
      s.x0 = left + i * dx;
      s.x1 = (i + 1 == k) ? partition.bounds[n + 1] : left + (i + 1) * dx;
      s.beta = (s.x0 - left) / len;
      s.alpha = 1.0 - s.beta;
      out.push_back(s);
    }
  }
  return out;
}

int segment_of(const std::vector<SegmentSpan>& segments, double x) {
  const auto it = std::lower_bound(
      segments.begin(), segments.end(), x,
      [](const SegmentSpan& s, double value) { return s.x1 < value; });
  if (it == segments.end()) {
    return static_cast<int>(segments.size()) - 1;
  }
  return static_cast<int>(it - segments.begin());
}

namespace {

// Partial-segment transport terms at offset delta past the segment start.
struct LocalTransport {
  Pose step;                 // exp(delta * Theta^)
  Matrix6d adjoint_inv;      // Ad^{-1} of the step
  Matrix6d tangent;          // T(Theta, delta)
  Matrix6d convolution;      // integral of Ad^{-1} ad(eta) over the step
  Matrix6d tangent_rate;     // dT/dt along the segment strain rate
  bool has_convolution = false;
};

// Convolution integral_0^delta exp(-(delta - sigma) ad(Theta)) ad(eta(sigma))
// dsigma, with eta(sigma) rebuilt from the frozen segment data.
Matrix6d convolution_term(const Vector6d& theta, double delta,
                          const Vector6d& eta_left,
                          const Vector6d& strain_rate,
                          const QuadratureRule& rule) {
  Matrix6d out = Matrix6d::Zero();
  for (int k = 0; k < rule.nodes.size(); ++k) {
    const double sigma = 0.5 * delta * (rule.nodes[k] + 1.0);
    const double weight = 0.5 * delta * rule.weights[k];
    const Pose partial = exp_pose(theta, sigma);
    const Vector6d eta =
        adjoint_inverse(partial) * eta_left + tangent_op(theta, sigma) * strain_rate;
    out.noalias() +=
        weight * (adjoint(exp_pose(theta, sigma - delta)) * ad(eta));
  }
  return out;
}

// Time derivative of the tangent operator along the segment strain rate:
// dT/dt = -integral_0^delta ad(T(Theta, u) Theta_dot) exp(-u ad(Theta)) du.
Matrix6d tangent_rate_term(const Vector6d& theta, double delta,
                           const Vector6d& strain_rate,
                           const QuadratureRule& rule) {
  Matrix6d out = Matrix6d::Zero();
  for (int k = 0; k < rule.nodes.size(); ++k) {
    const double u = 0.5 * delta * (rule.nodes[k] + 1.0);
    const double weight = 0.5 * delta * rule.weights[k];
    const Vector6d swept = tangent_op(theta, u) * strain_rate;
    out.noalias() -= weight * (ad(swept) * adjoint_inverse(exp_pose(theta, u)));
  }
  return out;
}

}  // namespace

std::vector<PointState> sweep(const Rod& rod, const Eigen::VectorXd& q,
                              const Eigen::VectorXd* qdot,
                              const Eigen::VectorXd* qddot,
                              const std::vector<double>& abscissae,
                              const SweepRequest& request) {
  const int dof = rod.dof();
  if (q.size() != dof) {
    throw std::invalid_argument("sweep: q has wrong size");
  }
  const bool need_rates =
      request.velocity || request.jacobian_dot || request.acceleration;
  if (need_rates && (qdot == nullptr || qdot->size() != dof)) {
    throw std::invalid_argument("sweep: request needs qdot of rod dof size");
  }
  if (request.acceleration && (qddot == nullptr || qddot->size() != dof)) {
    throw std::invalid_argument("sweep: request needs qddot of rod dof size");
  }
  for (std::size_t i = 0; i < abscissae.size(); ++i) {
    if (abscissae[i] < 0.0 || abscissae[i] > rod.length()) {
      throw std::domain_error("sweep: abscissa outside [0, L]");
    }
    if (i > 0 && abscissae[i] < abscissae[i - 1]) {
      throw std::invalid_argument("sweep: abscissae must be sorted");
    }
  }

  const auto segments = build_segments(rod.partition);
  const bool need_convolution = request.jacobian_dot || request.acceleration;
  QuadratureRule conv_rule;
  if (need_convolution) {
    conv_rule = gauss_legendre(request.convolution_order);
  }

  // State accumulated at the start of the current segment. The time
  // derivative of the Jacobian transports the accumulated Jacobian itself,
  // so requesting it forces the Jacobian recursion on as well.
  const bool need_jacobian = request.jacobian || request.jacobian_dot;
  Pose g;
  Eigen::MatrixXd j_cum, jdot_cum;
  if (need_jacobian) {
    j_cum = Eigen::MatrixXd::Zero(6, dof);
  }
  if (request.jacobian_dot) {
    jdot_cum = Eigen::MatrixXd::Zero(6, dof);
  }
  Vector6d eta = Vector6d::Zero();
  Vector6d eta_dot = Vector6d::Zero();
  Vector6d zeta = Vector6d::Zero();

  std::vector<PointState> out(abscissae.size());
  std::size_t next = 0;

  for (std::size_t si = 0; si < segments.size() && next <= abscissae.size();
       ++si) {
    const SegmentSpan& seg = segments[si];
    const int n = seg.section;
    const Vector6d theta =
        seg.alpha * q.segment<6>(6 * n) + seg.beta * q.segment<6>(6 * (n + 1));
    Vector6d strain_rate = Vector6d::Zero();
    Vector6d strain_accel = Vector6d::Zero();
    if (need_rates) {
      strain_rate = seg.alpha * qdot->segment<6>(6 * n) +
                    seg.beta * qdot->segment<6>(6 * (n + 1));
    }
    if (request.acceleration) {
      strain_accel = seg.alpha * qddot->segment<6>(6 * n) +
                     seg.beta * qddot->segment<6>(6 * (n + 1));
    }

    const auto local_at = [&](double delta) {
      LocalTransport t;
      t.step = exp_pose(theta, delta);
      t.adjoint_inv = adjoint_inverse(t.step);
      t.tangent = tangent_op(theta, delta);
      if (need_convolution) {
        t.convolution =
            convolution_term(theta, delta, eta, strain_rate, conv_rule);
        t.has_convolution = true;
      }
      if (request.jacobian_dot) {
        t.tangent_rate = tangent_rate_term(theta, delta, strain_rate, conv_rule);
      }
      return t;
    };

    const bool last_segment = si + 1 == segments.size();
    while (next < abscissae.size() &&
           (abscissae[next] <= seg.x1 || last_segment)) {
      const double x = abscissae[next];
      const double delta = x - seg.x0;
      const LocalTransport t = local_at(delta);
      PointState& ps = out[next];
      ps.x = x;
      ps.section = n;
      ps.wb = (x - rod.partition.bounds[n]) / rod.partition.section_length(n);
      ps.wa = 1.0 - ps.wb;
      ps.pose = g * t.step;
      ps.strain = ps.wa * q.segment<6>(6 * n) + ps.wb * q.segment<6>(6 * (n + 1));
      if (need_jacobian) {
        ps.jacobian.noalias() = t.adjoint_inv * j_cum;
        ps.jacobian.block<6, 6>(0, 6 * n) += seg.alpha * t.tangent;
        ps.jacobian.block<6, 6>(0, 6 * (n + 1)) += seg.beta * t.tangent;
      }
      if (need_rates) {
        ps.velocity = t.adjoint_inv * eta + t.tangent * strain_rate;
      }
      if (request.jacobian_dot) {
        ps.jacobian_dot.noalias() = t.adjoint_inv * jdot_cum;
        ps.jacobian_dot.noalias() -=
            ad(t.tangent * strain_rate) * (t.adjoint_inv * j_cum);
        ps.jacobian_dot.block<6, 6>(0, 6 * n) += seg.alpha * t.tangent_rate;
        ps.jacobian_dot.block<6, 6>(0, 6 * (n + 1)) +=
            seg.beta * t.tangent_rate;
        ps.velocity_remainder =
            t.adjoint_inv * zeta + t.convolution * strain_rate;
      }
      if (request.acceleration) {
        ps.acceleration = t.adjoint_inv * eta_dot +
                          t.convolution * strain_rate + t.tangent * strain_accel;
      }
      ++next;
    }
    if (next >= abscissae.size()) {
      break;
    }

    // Advance the accumulated state across the whole segment. The Jacobian
    // rate uses the Jacobian at the segment start, so update it first.
    const LocalTransport t = local_at(seg.x1 - seg.x0);
    g = g * t.step;
    if (request.jacobian_dot) {
      jdot_cum = t.adjoint_inv * jdot_cum;
      jdot_cum.noalias() -=
          ad(t.tangent * strain_rate) * (t.adjoint_inv * j_cum);
      jdot_cum.block<6, 6>(0, 6 * n) += seg.alpha * t.tangent_rate;
      jdot_cum.block<6, 6>(0, 6 * (n + 1)) += seg.beta * t.tangent_rate;
      zeta = t.adjoint_inv * zeta + t.convolution * strain_rate;
    }
    if (need_jacobian) {
      j_cum = t.adjoint_inv * j_cum;
      j_cum.block<6, 6>(0, 6 * n) += seg.alpha * t.tangent;
      j_cum.block<6, 6>(0, 6 * (n + 1)) += seg.beta * t.tangent;
    }
    if (request.acceleration) {
      eta_dot = t.adjoint_inv * eta_dot + t.convolution * strain_rate +
                t.tangent * strain_accel;
    }
    if (need_rates) {
      eta = t.adjoint_inv * eta + t.tangent * strain_rate;
    }
  }
  return out;
}

Pose pose_at(const Rod& rod, const Eigen::VectorXd& q, double x) {
  SweepRequest req;
  return sweep(rod, q, nullptr, nullptr, {x}, req)[0].pose;
}

Vector6d velocity_at(const Rod& rod, const Eigen::VectorXd& q,
                     const Eigen::VectorXd& qdot, double x) {
  SweepRequest req;
  req.velocity = true;
  return sweep(rod, q, &qdot, nullptr, {x}, req)[0].velocity;
}

Vector6d acceleration_at(const Rod& rod, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& qdot,
                         const Eigen::VectorXd& qddot, double x) {
  SweepRequest req;
  req.velocity = true;
  req.acceleration = true;
  return sweep(rod, q, &qdot, &qddot, {x}, req)[0].acceleration;
}

Eigen::MatrixXd strain_jacobian(const Rod& rod, const Eigen::VectorXd& q,
                                double x) {
  SweepRequest req;
  req.jacobian = true;
  return sweep(rod, q, nullptr, nullptr, {x}, req)[0].jacobian;
}

Eigen::MatrixXd strain_jacobian_dot(const Rod& rod, const Eigen::VectorXd& q,
                                    const Eigen::VectorXd& qdot, double x) {
  SweepRequest req;
  req.jacobian_dot = true;
  return sweep(rod, q, &qdot, nullptr, {x}, req)[0].jacobian_dot;
}

std::vector<PointState> centerline(const Rod& rod, const Eigen::VectorXd& q,
                                   int samples) {
  if (samples < 2) {
    throw std::invalid_argument("centerline needs at least two samples");
  }
  std::vector<double> xs(samples);
  for (int i = 0; i < samples; ++i) {
    xs[i] = rod.length() * static_cast<double>(i) / (samples - 1);
  }
  xs.back() = rod.length();
  SweepRequest req;
  return sweep(rod, q, nullptr, nullptr, xs, req);
}

QuadratureRule gauss_legendre(int order) {
  if (order < 2 || order > 16) {
    throw std::invalid_argument("gauss_legendre order must be in [2, 16]");
  }
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration on the Legendre polynomial from the Chebyshev guess.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 0; j < order; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = order * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) {
        break;
      }
    }
    rule.nodes[i] = -z;
    rule.nodes[order - 1 - i] = z;
    rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[order - 1 - i] = rule.weights[i];
  }
  return rule;
}

QuadratureGrid quadrature_grid(const Partition& partition, int order) {
  const QuadratureRule rule = gauss_legendre(order);
  const auto segments = build_segments(partition);
  QuadratureGrid grid;
  grid.abscissae.reserve(segments.size() * order);
  grid.weights.reserve(segments.size() * order);
  for (const SegmentSpan& seg : segments) {
    const double mid = 0.5 * (seg.x0 + seg.x1);
    const double halfw = 0.5 * (seg.x1 - seg.x0);
    for (int k = 0; k < order; ++k) {
      grid.abscissae.push_back(mid + halfw * rule.nodes[k]);
      grid.weights.push_back(halfw * rule.weights[k]);
    }
  }
  return grid;
}

Pose pcs_pose_at(const Rod& rod, const Eigen::VectorXd& q_pcs, double x) {
  const int sections = rod.partition.section_count();
  if (q_pcs.size() != 6 * sections) {
    throw std::invalid_argument("pcs_pose_at: q has wrong size");
  }
  const InterpWeights w = interp_weights(rod.partition, x);
  Pose g;
  for (int n = 0; n < w.section; ++n) {
    g = g * exp_pose(q_pcs.segment<6>(6 * n), rod.partition.section_length(n));
  }
  const double local = x - rod.partition.bounds[w.section];
  return g * exp_pose(q_pcs.segment<6>(6 * w.section), local);
}

Eigen::MatrixXd pcs_strain_jacobian(const Rod& rod,
                                    const Eigen::VectorXd& q_pcs, double x) {
  const int sections = rod.partition.section_count();
  if (q_pcs.size() != 6 * sections) {
    throw std::invalid_argument("pcs_strain_jacobian: q has wrong size");
  }
  const InterpWeights w = interp_weights(rod.partition, x);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(6, 6 * sections);
  for (int n = 0; n < w.section; ++n) {
    const double len = rod.partition.section_length(n);
    const Vector6d xi = q_pcs.segment<6>(6 * n);
    const Matrix6d step = adjoint_inverse(exp_pose(xi, len));
    jac.leftCols(6 * n) = step * jac.leftCols(6 * n);
    jac.block<6, 6>(0, 6 * n) = tangent_op(xi, len);
  }
  const double local = x - rod.partition.bounds[w.section];
  const Vector6d xi = q_pcs.segment<6>(6 * w.section);
  const Matrix6d step = adjoint_inverse(exp_pose(xi, local));
  jac.leftCols(6 * w.section) = step * jac.leftCols(6 * w.section);
  jac.block<6, 6>(0, 6 * w.section) = tangent_op(xi, local);
  return jac;
}

}  // namespace plsrod
