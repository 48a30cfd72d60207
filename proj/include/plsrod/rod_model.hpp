#pragma once

#include <vector>

#include "plsrod/se3.hpp"

namespace plsrod {

// Linearly tapered circular cross-section profile.
struct RadiusProfile {
  double base_radius = 0.0;  // m, at X = 0
  double tip_radius = 0.0;   // m, at X = L
  double length = 0.0;       // m

  // Radius at arc length X in [0, L]; throws std::domain_error outside.
  double radius_at(double x) const;
  double slope() const { return (tip_radius - base_radius) / length; }
};

// Homogeneous isotropic material with a linear viscous damping coefficient.
struct Material {
  double young_modulus = 0.0;   // Pa
  double shear_modulus = 0.0;   // Pa
  double density = 0.0;         // kg/m^3
  double viscosity = 0.0;       // Pa*s

  static Material from_poisson(double young_modulus, double poisson_ratio,
                               double density, double viscosity);
  // Throws std::invalid_argument when moduli/density are not positive or the
  // viscosity is negative.
  void validate() const;
};

// Area and second moments of a circular cross-section.
struct CrossSection {
  double area = 0.0;       // m^2
  double torsion = 0.0;    // polar second moment J_x, m^4
  double bending_y = 0.0;  // J_y, m^4
  double bending_z = 0.0;  // J_z, m^4
};

CrossSection cross_section(const RadiusProfile& profile, double x);

// Diagonals of the 6x6 screw inertia, stiffness, and damping densities at one
// cross-section, ordered (angular; linear).
struct SectionMatrices {
  Vector6d inertia = Vector6d::Zero();    // rho * diag(Jx, Jy, Jz, A, A, A)
  Vector6d stiffness = Vector6d::Zero();  // diag(GJx, EJy, EJz, EA, GA, GA)
  Vector6d damping = Vector6d::Zero();    // diag(mu.Jx, 3mu.Jy, 3mu.Jz, 3mu.A, mu.A, mu.A)
};

SectionMatrices section_matrices(const RadiusProfile& profile,
                                 const Material& material, double x);

// Arc-length derivatives of the stiffness and damping diagonals, exact for the
// affine radius profile.
struct SectionMatrixSlopes {
  Vector6d stiffness = Vector6d::Zero();
  Vector6d damping = Vector6d::Zero();
};

SectionMatrixSlopes section_matrix_slopes(const RadiusProfile& profile,
                                          const Material& material, double x);

// Node abscissae 0 = X_0 < X_1 < ... < X_N = L splitting the rod into N
// sections, each subdivided into `segments_per_section` equal segments for the
// kinematic sweep.
struct Partition {
  std::vector<double> bounds;
  int segments_per_section = 1;

  int section_count() const { return static_cast<int>(bounds.size()) - 1; }
  double length() const { return bounds.back(); }
  double section_length(int section) const {
    return bounds[section + 1] - bounds[section];
  }
  // Throws std::invalid_argument unless bounds start at 0, strictly increase,
  // and the segment count is positive.
  void validate() const;
};

// Linear interpolation weights of the two node strains bracketing X. A point
// exactly on an interior node belongs to the section ending there (b = 1);
// X = 0 belongs to the first section (a = 1).
struct InterpWeights {
  int section = 0;  // 0-based section index
  double a = 0.0;   // weight of the left node strain
  double b = 0.0;   // weight of the right node strain
};

InterpWeights interp_weights(const Partition& partition, double x);

// Full rod description shared by all higher-level modules.
struct Rod {
  RadiusProfile profile;
  Material material;
  Partition partition;
  Pose base_pose;                   // placement of the X = 0 frame
  Vector6d rest_strain = (Vector6d() << 0, 0, 0, 1, 0, 0).finished();

  int node_count() const { return partition.section_count() + 1; }
  int dof() const { return 6 * node_count(); }
  double length() const { return partition.length(); }
  void validate() const;
};

// Stacked rest configuration (every node strain at the rest strain).
Eigen::VectorXd straight_configuration(const Rod& rod);

// Node strains interpolated at X for a stacked configuration q.
Vector6d strain_at(const Rod& rod, const Eigen::VectorXd& q, double x);

}  // namespace plsrod
