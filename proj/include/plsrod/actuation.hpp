#pragma once

#include <vector>

#include "plsrod/rod_model.hpp"

namespace plsrod {

// Tendons routed through guide holes at azimuth phi on a circle of linearly
// tapered offset radius, anchored at the tip.
struct CableSet {
  std::vector<double> azimuth;  // rad, in the cross-section (y, z) plane
  double base_offset = 0.0;     // m, hole circle radius at X = 0
  double tip_offset = 0.0;      // m, hole circle radius at X = L
  double length = 0.0;          // m, rod length the offsets interpolate over

  int count() const { return static_cast<int>(azimuth.size()); }
  // Throws std::invalid_argument on negative offsets or non-positive length
  // (when any cable is present).
  void validate() const;
};

// Hole position in the cross-section frame at abscissa x.
Eigen::Vector3d cable_offset(const CableSet& cables, int index, double x);

// Arc-length derivative of the hole position (constant for the affine taper).
Eigen::Vector3d cable_offset_slope(const CableSet& cables, int index);

// Unit tangent of the cable path in the body frame under the local strain.
// Throws std::domain_error when the configuration makes the tangent
// degenerate (path derivative shorter than 1e-9).
Eigen::Vector3d cable_tangent(const CableSet& cables, int index, double x,
                              const Vector6d& strain);

// Maps tensions to the internal actuation wrench: columns (d x t; t), 6 x n_c.
Eigen::MatrixXd routing_matrix(const CableSet& cables, const Vector6d& strain,
                               double x);

// Arc-length derivative of the routing matrix along the strained rod,
// central differences with step 1e-6 * L (one-sided at the ends).
Eigen::MatrixXd routing_matrix_slope(const CableSet& cables, const Rod& rod,
                                     const Eigen::VectorXd& q, double x);

// Acceleration twist of a uniform gravity field, (0; g_vec) in the inertial
// frame.
Vector6d gravity_twist(const Eigen::Vector3d& linear_acceleration);

// Distributed gravity wrench density at a cross-section, in the body frame.
Vector6d gravity_wrench(const SectionMatrices& section, const Pose& pose,
                        const Pose& base_pose, const Vector6d& gravity);

// Concentrated wrench applied at a fixed abscissa, in the body frame there.
struct PointLoad {
  double x = 0.0;
  Vector6d wrench = Vector6d::Zero();
};

// Complete loading of one standing problem.
struct LoadCase {
  Vector6d gravity = Vector6d::Zero();          // inertial acceleration twist
  Eigen::VectorXd tensions;                     // per cable, N
  Vector6d tip_wrench = Vector6d::Zero();       // body frame at X = L
  std::vector<PointLoad> point_loads;

  // Throws std::invalid_argument unless tensions match the cable count and
  // point loads lie inside (0, L).
  void validate(const CableSet& cables, double length) const;
};

}  // namespace plsrod
