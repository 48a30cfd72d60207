#include "plsrod/se3.hpp"

#include <cmath>

namespace plsrod {

namespace {

// Below this rotation angle the closed-form trigonometric coefficients lose
// precision to cancellation, so truncated series are used instead.
constexpr double kSmallAngle = 1e-2;

}  // namespace

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

double Pose::orthonormality_defect() const {
  return (rotation.transpose() * rotation - Eigen::Matrix3d::Identity())
      .cwiseAbs()
      .maxCoeff();
}

Eigen::Matrix3d skew(const Eigen::Vector3d& w) {
  Eigen::Matrix3d m;
  m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return m;
}

Eigen::Matrix4d hat(const Vector6d& v) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m.topLeftCorner<3, 3>() = skew(v.head<3>());
  m.topRightCorner<3, 1>() = v.tail<3>();
  return m;
}

Vector6d vee(const Eigen::Matrix4d& m) {
  Vector6d v;
  v << m(2, 1), m(0, 2), m(1, 0), m(0, 3), m(1, 3), m(2, 3);
  return v;
}

Matrix6d ad(const Vector6d& v) {
  const Eigen::Matrix3d k = skew(v.head<3>());
  Matrix6d m = Matrix6d::Zero();
  m.topLeftCorner<3, 3>() = k;
  m.bottomRightCorner<3, 3>() = k;
  m.bottomLeftCorner<3, 3>() = skew(v.tail<3>());
  return m;
}

Matrix6d adjoint(const Pose& g) {
  Matrix6d m = Matrix6d::Zero();
  m.topLeftCorner<3, 3>() = g.rotation;
  m.bottomRightCorner<3, 3>() = g.rotation;
  m.bottomLeftCorner<3, 3>() = skew(g.translation) * g.rotation;
  return m;
}

Matrix6d adjoint_inverse(const Pose& g) {
  const Eigen::Matrix3d rt = g.rotation.transpose();
  Matrix6d m = Matrix6d::Zero();
  m.topLeftCorner<3, 3>() = rt;
  m.bottomRightCorner<3, 3>() = rt;
  m.bottomLeftCorner<3, 3>() = -rt * skew(g.translation);
  return m;
}

Pose exp_pose(const Vector6d& v, double s) {
  const Eigen::Vector3d angular = v.head<3>();
  const Eigen::Vector3d linear = v.tail<3>();
  const double theta = angular.norm();
  const double phi = s * theta;

  // R = I + c1 K^ + c2 K^2, p = (s I + c2 K^ + c3 K^2) Q with
  // c1 = sin(phi)/theta, c2 = (1 - cos(phi))/theta^2,
  // c3 = (phi - sin(phi))/theta^3.
  double c1, c2, c3;
  if (std::abs(phi) < kSmallAngle) {
    const double p2 = phi * phi;
    const double p4 = p2 * p2;
    c1 = s * (1.0 - p2 / 6.0 + p4 / 120.0);
    c2 = s * s * (0.5 - p2 / 24.0 + p4 / 720.0);
    c3 = s * s * s * (1.0 / 6.0 - p2 / 120.0 + p4 / 5040.0);
  } else {
    c1 = std::sin(phi) / theta;
    c2 = (1.0 - std::cos(phi)) / (theta * theta);
    c3 = (phi - std::sin(phi)) / (theta * theta * theta);
  }

  const Eigen::Matrix3d k = skew(angular);
  const Eigen::Matrix3d k2 = k * k;
  Pose g;
  g.rotation = Eigen::Matrix3d::Identity() + c1 * k + c2 * k2;
  g.translation = (s * Eigen::Matrix3d::Identity() + c2 * k + c3 * k2) * linear;
  return g;
}

Matrix6d exp_ad(const Vector6d& v, double s) {
  return adjoint(exp_pose(v, s));
}

Matrix6d tangent_op(const Vector6d& v, double s) {
  const double theta = v.head<3>().norm();
  const double phi = s * theta;

  // T = s I - b1 A + b2 A^2 - b3 A^3 + b4 A^4 with A = ad(v); the scalar
  // coefficients come from integrating the degree-four polynomial expansion
  // of exp(-u A) over u in [0, s].
  double b1, b2, b3, b4;
  if (std::abs(phi) < kSmallAngle) {
    const double p2 = phi * phi;
    const double p4 = p2 * p2;
    const double s2 = s * s;
    b1 = 0.5 * s2 * (1.0 - p4 / 360.0);
    b2 = s2 * s * (1.0 - p4 / 840.0) / 6.0;
    b3 = s2 * s2 * (1.0 - p2 / 15.0 + p4 / 560.0) / 24.0;
    b4 = s2 * s2 * s * (1.0 - p2 / 21.0 + p4 / 1008.0) / 120.0;
  } else {
    const double cp = std::cos(phi);
    const double sp = std::sin(phi);
    const double t2 = theta * theta;
    const double t3 = t2 * theta;
    b1 = (4.0 * (1.0 - cp) - phi * sp) / (2.0 * t2);
    b2 = (phi * (4.0 + cp) - 5.0 * sp) / (2.0 * t3);
    b3 = (2.0 * (1.0 - cp) - phi * sp) / (2.0 * t2 * t2);
    b4 = (phi * (2.0 + cp) - 3.0 * sp) / (2.0 * t2 * t3);
  }

  const Matrix6d a = ad(v);
  const Matrix6d a2 = a * a;
  return s * Matrix6d::Identity() - b1 * a + b2 * a2 - b3 * a2 * a +
         b4 * a2 * a2;
}

}  // namespace plsrod
