#pragma once

#include <algorithm>
#include <functional>
#include <random>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "plsrod/se3.hpp"

namespace plsrod::testing {

// Dense matrix exponential (scaling-and-squaring), independent of the
// closed-form screw formulas under test.
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& m) {
  return m.exp();
}

// Integrates g' = g * hat(field(x)) from the identity with classic RK4 on the
// homogeneous matrix, then re-orthonormalizes the rotation block.
inline Pose rk4_pose(const std::function<Vector6d(double)>& field, double s,
                     int steps) {
  Eigen::Matrix4d g = Eigen::Matrix4d::Identity();
  const double h = s / steps;
  for (int i = 0; i < steps; ++i) {
    const double x = i * h;
    const Eigen::Matrix4d k1 = g * hat(field(x));
    const Eigen::Matrix4d k2 = (g + 0.5 * h * k1) * hat(field(x + 0.5 * h));
    const Eigen::Matrix4d k3 = (g + 0.5 * h * k2) * hat(field(x + 0.5 * h));
    const Eigen::Matrix4d k4 = (g + h * k3) * hat(field(x + h));
    g += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  Pose pose;
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      g.topLeftCorner<3, 3>(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  pose.rotation = svd.matrixU() * svd.matrixV().transpose();
  pose.translation = g.topRightCorner<3, 1>();
  return pose;
}

// Same integrator, but for strain fields with jump discontinuities at known
// breakpoints: each smooth piece is integrated separately and the resulting
// poses are composed, so no RK4 step straddles a jump. Stage abscissae are
// nudged inside the open piece before sampling the field.
inline Pose rk4_pose_pieces(const std::function<Vector6d(double)>& field,
                            const std::vector<double>& breaks,
                            int steps_per_piece) {
  Pose pose;
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double x0 = breaks[p];
    const double len = breaks[p + 1] - x0;
    const double inset = 1e-9 * len;
    const auto local = [&](double s) {
      const double x = std::min(std::max(x0 + s, x0 + inset),
                                x0 + len - inset);
      return field(x);
    };
    const Pose piece = rk4_pose(local, len, steps_per_piece);
    pose.translation += pose.rotation * piece.translation;
    pose.rotation = pose.rotation * piece.rotation;
  }
  return pose;
}

// 64-point Gauss-Legendre value of integral_0^s exp(-(s - tau) ad(v)) dtau,
// with the integrand evaluated through the dense matrix exponential.
inline Matrix6d dense_tangent(const Vector6d& v, double s) {
  static const auto rule = [] {
    // Golub-Welsch on the Jacobi matrix for [-1, 1].
    const int n = 64;
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
      const double b = i / std::sqrt(4.0 * i * i - 1.0);
      jacobi(i - 1, i) = b;
      jacobi(i, i - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    Eigen::VectorXd nodes = es.eigenvalues();
    Eigen::VectorXd weights(n);
    for (int i = 0; i < n; ++i) {
      weights[i] = 2.0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
    }
    return std::make_pair(nodes, weights);
  }();
  Matrix6d sum = Matrix6d::Zero();
  const Matrix6d a = ad(v);
  for (int i = 0; i < rule.first.size(); ++i) {
    const double tau = 0.5 * s * (rule.first[i] + 1.0);
    const double w = 0.5 * s * rule.second[i];
    sum += w * Matrix6d(expm(-(s - tau) * a));
  }
  return sum;
}

struct TwistSampler {
  std::mt19937_64 rng;
  explicit TwistSampler(unsigned long long seed) : rng(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }

  Vector6d twist(double angular_scale, double linear_scale) {
    Vector6d v;
    for (int i = 0; i < 3; ++i) v[i] = uniform(-angular_scale, angular_scale);
    for (int i = 3; i < 6; ++i) v[i] = uniform(-linear_scale, linear_scale);
    return v;
  }

  Eigen::VectorXd vector(int n, double scale) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(-scale, scale);
    return v;
  }
};

}  // namespace plsrod::testing
