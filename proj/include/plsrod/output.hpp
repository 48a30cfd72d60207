#pragma once

#include <string>
#include <vector>

#include "plsrod/dynamics.hpp"
#include "plsrod/identification.hpp"
#include "plsrod/statics.hpp"

namespace plsrod {

// Fixed 9-significant-digit rendering ("%.9g"): locale-free and byte-stable,
// so rerunning a command reproduces its CSV artifacts exactly.
std::string format_number(double value);

// One CSV line from preformatted cells.
std::string csv_line(const std::vector<std::string>& cells);

// World-frame centerline samples: X, position, orientation quaternion (wxyz,
// sign-continuous along the rod, first hemisphere fixed by qw >= 0).
void write_centerline_csv(const std::string& path, const Rod& rod,
                          const Eigen::VectorXd& q, int samples);

// Static solve summary: world tip pose, convergence diagnostics.
void write_static_json(const std::string& path, const Rod& rod,
                       const StaticResult& result);

// Rows (t, world tip position, stacked node strains).
void write_trajectory_csv(const std::string& path, const SimulationResult& result);

// Side stream of the energy audit per recorded sample.
void write_energy_json(const std::string& path, const SimulationResult& result);

// Identification outcome with per-experiment tip errors (m).
void write_identify_json(const std::string& path,
                         const IdentificationResult& result,
                         const std::vector<double>& errors);

// Machine-readable failure artifact; also returned as a string for stdout.
std::string error_json(const std::string& message, const std::string& field);
void write_error_json(const std::string& path, const std::string& message,
                      const std::string& field);

}  // namespace plsrod
