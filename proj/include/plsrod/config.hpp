#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "plsrod/dynamics.hpp"
#include "plsrod/identification.hpp"
#include "plsrod/statics.hpp"

namespace plsrod {

// Schema violation with the offending field path, e.g. "rod.length_m".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what),
        field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct StaticCommand {
  LoadCase loads;
  StaticOptions options;
  int centerline_samples = 201;
};

struct SweepCommand {
  std::vector<Eigen::VectorXd> tension_cases;
  StaticOptions options;
  int centerline_samples = 201;
};

struct DynamicCommand {
  TensionSchedule schedule;
  SimulationOptions options;
};

struct CompareCommand {
  std::vector<std::string> models;  // "pls", "pcs", or a mode-selection name
  LoadCase loads;
  StaticOptions options;
  std::optional<Eigen::Vector3d> reference_tip;  // m, world frame
  int centerline_samples = 201;
};

struct IdentifyCommand {
  std::vector<Experiment> experiments;
  Eigen::Vector3d initial = Eigen::Vector3d::Zero();  // (E, G, rho)
  IdentifyOptions options;
};

struct ValidateCommand {
  std::vector<Experiment> experiments;
  StaticOptions options;
};

struct ProjectConfig {
  Rod rod;
  bool viscosity_specified = false;  // dynamics refuses to run without it
  CableSet cables;
  Vector6d gravity = Vector6d::Zero();  // inertial acceleration twist
  std::string mode = "full";

  std::optional<StaticCommand> static_command;
  std::optional<SweepCommand> sweep_command;
  std::optional<DynamicCommand> dynamic_command;
  std::optional<CompareCommand> compare_command;
  std::optional<IdentifyCommand> identify_command;
  std::optional<ValidateCommand> validate_command;
};

// Parses and validates a JSON config; unknown keys are rejected with their
// field path. Relative experiment-file paths resolve against the config file.
ProjectConfig load_config(const std::string& path);

// Experiment table: one row per experiment, tension columns (N) then the
// measured tip coordinates; `unit_scale` converts tip values to metres.
std::vector<Experiment> load_experiments_csv(const std::string& path,
                                             int cable_count,
                                             double unit_scale);

}  // namespace plsrod
