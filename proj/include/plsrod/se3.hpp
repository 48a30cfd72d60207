#pragma once

#include <Eigen/Dense>

namespace plsrod {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

// Rigid transform on SE(3). Twists use the (angular; linear) component order
// throughout the library.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose identity() { return Pose{}; }

  Pose operator*(const Pose& other) const {
    return Pose{rotation * other.rotation,
                rotation * other.translation + translation};
  }

  Pose inverse() const {
    return Pose{rotation.transpose(), -(rotation.transpose() * translation)};
  }

  Eigen::Matrix4d matrix() const;

  // Max deviation of R^T R from the identity; used by validity checks.
  double orthonormality_defect() const;
};

// 3x3 skew matrix of a vector, w^ y = w x y.
Eigen::Matrix3d skew(const Eigen::Vector3d& w);

// 4x4 matrix form of a twist (angular; linear).
Eigen::Matrix4d hat(const Vector6d& v);

// Inverse of hat for matrices produced by it.
Vector6d vee(const Eigen::Matrix4d& m);

// 6x6 adjoint representation of a twist: ad(v) = [[K^, 0], [Q^, K^]].
Matrix6d ad(const Vector6d& v);

// 6x6 adjoint of a rigid transform: Ad(g) = [[R, 0], [p^ R, R]].
Matrix6d adjoint(const Pose& g);

// Adjoint of the inverse transform, formed without inverting g explicitly.
Matrix6d adjoint_inverse(const Pose& g);

// Screw motion exp(s * hat(v)) in closed form; switches to a truncated series
// for small rotation angle s*|angular(v)|.
Pose exp_pose(const Vector6d& v, double s);

// exp(s * ad(v)), computed through the adjoint of the screw motion.
Matrix6d exp_ad(const Vector6d& v, double s);

// Tangent operator T(v, s) = integral_0^s exp(-(s - tau) ad(v)) dtau in
// closed form, with a series fallback near zero angle.
Matrix6d tangent_op(const Vector6d& v, double s);

}  // namespace plsrod
