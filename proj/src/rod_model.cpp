#include "plsrod/rod_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace plsrod {

double RadiusProfile::radius_at(double x) const {
  if (x < 0.0 || x > length) {
    throw std::domain_error("radius_at: abscissa outside [0, L]");
  }
  return base_radius + slope() * x;
}

Material Material::from_poisson(double young_modulus, double poisson_ratio,
                                double density, double viscosity) {
  Material m;
  m.young_modulus = young_modulus;
  m.shear_modulus = young_modulus / (2.0 * (1.0 + poisson_ratio));
  m.density = density;
  m.viscosity = viscosity;
  m.validate();
  return m;
}

void Material::validate() const {
  if (young_modulus <= 0.0 || shear_modulus <= 0.0 || density <= 0.0) {
    throw std::invalid_argument("material moduli and density must be positive");
  }
  if (viscosity < 0.0) {
    throw std::invalid_argument("material viscosity must be non-negative");
  }
}

CrossSection cross_section(const RadiusProfile& profile, double x) {
  const double r = profile.radius_at(x);
  const double r2 = r * r;
  CrossSection cs;
  cs.area = std::numbers::pi * r2;
  cs.bending_y = std::numbers::pi * r2 * r2 / 4.0;
  cs.bending_z = cs.bending_y;
  cs.torsion = cs.bending_y + cs.bending_z;
  return cs;
}

SectionMatrices section_matrices(const RadiusProfile& profile,
                                 const Material& material, double x) {
  const CrossSection cs = cross_section(profile, x);
  const double e = material.young_modulus;
  const double g = material.shear_modulus;
  const double mu = material.viscosity;
  SectionMatrices m;
  m.inertia << cs.torsion, cs.bending_y, cs.bending_z, cs.area, cs.area,
      cs.area;
  m.inertia *= material.density;
  m.stiffness << g * cs.torsion, e * cs.bending_y, e * cs.bending_z,
      e * cs.area, g * cs.area, g * cs.area;
  m.damping << mu * cs.torsion, 3.0 * mu * cs.bending_y, 3.0 * mu * cs.bending_z,
      3.0 * mu * cs.area, mu * cs.area, mu * cs.area;
  return m;
}

SectionMatrixSlopes section_matrix_slopes(const RadiusProfile& profile,
                                          const Material& material, double x) {
  const double r = profile.radius_at(x);
  const double dr = profile.slope();
  const double area_slope = 2.0 * std::numbers::pi * r * dr;
  const double bending_slope = std::numbers::pi * r * r * r * dr;  // d(Jy)/dX
  const double torsion_slope = 2.0 * bending_slope;
  const double e = material.young_modulus;
  const double g = material.shear_modulus;
  const double mu = material.viscosity;
  SectionMatrixSlopes s;
  s.stiffness << g * torsion_slope, e * bending_slope, e * bending_slope,
      e * area_slope, g * area_slope, g * area_slope;
  s.damping << mu * torsion_slope, 3.0 * mu * bending_slope,
      3.0 * mu * bending_slope, 3.0 * mu * area_slope, mu * area_slope,
      mu * area_slope;
  return s;
}

void Partition::validate() const {
  if (bounds.size() < 2) {
    throw std::invalid_argument("partition needs at least one section");
  }
  if (bounds.front() != 0.0) {
    throw std::invalid_argument("partition must start at X = 0");
  }
  for (std::size_t i = 1; i < bounds.size(); ++i) {
    if (bounds[i] <= bounds[i - 1]) {
      throw std::invalid_argument("partition bounds must strictly increase");
    }
  }
  if (segments_per_section < 1) {
    throw std::invalid_argument("segments per section must be positive");
  }
}

InterpWeights interp_weights(const Partition& partition, double x) {
  if (x < 0.0 || x > partition.length()) {
    throw std::domain_error("interp_weights: abscissa outside [0, L]");
  }
  // First section index whose right bound reaches x; x = 0 maps to section 0.
  const auto it =
      std::lower_bound(partition.bounds.begin() + 1, partition.bounds.end(), x);
  int section = static_cast<int>(it - partition.bounds.begin()) - 1;
  section = std::clamp(section, 0, partition.section_count() - 1);
  InterpWeights w;
  w.section = section;
  const double left = partition.bounds[section];
  const double len = partition.section_length(section);
  w.b = (x - left) / len;
  w.a = 1.0 - w.b;
  return w;
}

void Rod::validate() const {
  material.validate();
  partition.validate();
  if (profile.base_radius <= 0.0 || profile.tip_radius <= 0.0) {
    throw std::invalid_argument("rod radii must be positive");
  }
  if (profile.length != partition.length()) {
    throw std::invalid_argument("profile length must match partition length");
  }
}

Eigen::VectorXd straight_configuration(const Rod& rod) {
  Eigen::VectorXd q(rod.dof());
  for (int i = 0; i < rod.node_count(); ++i) {
    q.segment<6>(6 * i) = rod.rest_strain;
  }
  return q;
}

Vector6d strain_at(const Rod& rod, const Eigen::VectorXd& q, double x) {
  const InterpWeights w = interp_weights(rod.partition, x);
  return w.a * q.segment<6>(6 * w.section) +
         w.b * q.segment<6>(6 * (w.section + 1));
}

}  // namespace plsrod
