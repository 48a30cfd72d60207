#include "plsrod/actuation.hpp"

#include <cmath>
#include <stdexcept>

namespace plsrod {

void CableSet::validate() const {
  if (azimuth.empty()) {
    return;
  }
  if (base_offset < 0.0 || tip_offset < 0.0) {
    throw std::invalid_argument("cable offsets must be non-negative");
  }
  if (length <= 0.0) {
    throw std::invalid_argument("cable set length must be positive");
  }
}

Eigen::Vector3d cable_offset(const CableSet& cables, int index, double x) {
  const double r =
      cables.base_offset + (cables.tip_offset - cables.base_offset) * x / cables.length;
  return {0.0, r * std::cos(cables.azimuth[index]),
          r * std::sin(cables.azimuth[index])};
}

Eigen::Vector3d cable_offset_slope(const CableSet& cables, int index) {
  const double dr = (cables.tip_offset - cables.base_offset) / cables.length;
  return {0.0, dr * std::cos(cables.azimuth[index]),
          dr * std::sin(cables.azimuth[index])};
}

Eigen::Vector3d cable_tangent(const CableSet& cables, int index, double x,
                              const Vector6d& strain) {
  const Eigen::Vector3d angular = strain.head<3>();
  const Eigen::Vector3d linear = strain.tail<3>();
  const Eigen::Vector3d path = linear + angular.cross(cable_offset(cables, index, x)) +
                               cable_offset_slope(cables, index);
  const double norm = path.norm();
  if (norm <= 1e-9) {
    throw std::domain_error("cable tangent degenerate at this configuration");
  }
  return path / norm;
}

Eigen::MatrixXd routing_matrix(const CableSet& cables, const Vector6d& strain,
                               double x) {
  Eigen::MatrixXd map(6, cables.count());
  for (int i = 0; i < cables.count(); ++i) {
    const Eigen::Vector3d t = cable_tangent(cables, i, x, strain);
    map.col(i).head<3>() = cable_offset(cables, i, x).cross(t);
    map.col(i).tail<3>() = t;
  }
  return map;
}

Eigen::MatrixXd routing_matrix_slope(const CableSet& cables, const Rod& rod,
                                     const Eigen::VectorXd& q, double x) {
  const double h = 1e-6 * rod.length();
  const double lo = std::max(0.0, x - h);
  const double hi = std::min(rod.length(), x + h);
  const Eigen::MatrixXd at_lo = routing_matrix(cables, strain_at(rod, q, lo), lo);
  const Eigen::MatrixXd at_hi = routing_matrix(cables, strain_at(rod, q, hi), hi);
  return (at_hi - at_lo) / (hi - lo);
}

Vector6d gravity_twist(const Eigen::Vector3d& linear_acceleration) {
  Vector6d g = Vector6d::Zero();
  g.tail<3>() = linear_acceleration;
  return g;
}

Vector6d gravity_wrench(const SectionMatrices& section, const Pose& pose,
                        const Pose& base_pose, const Vector6d& gravity) {
  return section.inertia.asDiagonal() *
         (adjoint_inverse(pose) * (adjoint_inverse(base_pose) * gravity));
}

void LoadCase::validate(const CableSet& cables, double length) const {
  if (tensions.size() != cables.count()) {
    throw std::invalid_argument("tension vector must match cable count");
  }
  for (const PointLoad& load : point_loads) {
    if (load.x <= 0.0 || load.x >= length) {
      throw std::invalid_argument("point loads must lie strictly inside the rod");
    }
  }
}

}  // namespace plsrod
