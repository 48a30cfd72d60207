#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "plsrod/config.hpp"
#include "plsrod/kinematics.hpp"
#include "plsrod/output.hpp"
#include "plsrod/reduction.hpp"

namespace fs = std::filesystem;

namespace {

using namespace plsrod;

struct CliArgs {
  std::string command;
  std::string config_path;
  std::string out_dir;
  unsigned long long seed = 0;
  int quadrature = 0;  // 0 keeps the config value
  int segments = 0;    // 0 keeps the config value
};

std::string out_path(const CliArgs& args, const std::string& name) {
  return (fs::path(args.out_dir) / name).string();
}

std::string case_name(const std::string& stem, int index) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%s_%03d.csv", stem.c_str(), index);
  return buffer;
}

[[noreturn]] void throw_missing_block(const std::string& command) {
  throw ConfigError(command, "config has no block for this command");
}

int run_static(const CliArgs& args, const ProjectConfig& config) {
  if (!config.static_command) throw_missing_block("static");
  const StaticCommand& cmd = *config.static_command;
  const ModeSelection selection = make_selection(config.mode);
  const Eigen::VectorXd q_rest = straight_configuration(config.rod);

  const StaticResult result = solve_static(config.rod, config.cables, cmd.loads,
                                           selection, q_rest, nullptr, cmd.options);
  write_static_json(out_path(args, "solution.json"), config.rod, result);
  if (!result.converged) {
    const std::string message = "static solve failed: " + result.message;
    std::cerr << message << "\n";
    write_error_json(out_path(args, "error.json"), message, "");
    std::cout << error_json(message, "");
    return 1;
  }
  write_centerline_csv(out_path(args, "centerline.csv"), config.rod, result.q,
                       cmd.centerline_samples);
  return 0;
}

int run_sweep(const CliArgs& args, const ProjectConfig& config) {
  if (!config.sweep_command) throw_missing_block("sweep");
  const SweepCommand& cmd = *config.sweep_command;
  const ModeSelection selection = make_selection(config.mode);
  const Eigen::VectorXd q_rest = straight_configuration(config.rod);

  std::vector<LoadCase> cases;
  for (const Eigen::VectorXd& tensions : cmd.tension_cases) {
    LoadCase loads;
    loads.gravity = config.gravity;
    loads.tensions = tensions;
    cases.push_back(loads);
  }
  const std::vector<StaticResult> results =
      solve_sweep(config.rod, config.cables, cases, selection, q_rest, cmd.options);

  auto summary = std::ofstream(out_path(args, "sweep_summary.csv"), std::ios::binary);
  std::vector<std::string> header = {"case"};
  for (int c = 0; c < config.cables.count(); ++c)
    header.push_back("T" + std::to_string(c + 1) + "_n");
  for (const char* name : {"tip_x_m", "tip_y_m", "tip_z_m"}) header.push_back(name);
  header.push_back("iterations");
  header.push_back("residual_norm");
  summary << csv_line(header);

  for (size_t i = 0; i < results.size(); ++i) {
    const StaticResult& result = results[i];
    if (!result.converged) {
      const std::string message = "sweep case " + std::to_string(i) +
                                  " failed: " + result.message;
      std::cerr << message << "\n";
      write_error_json(out_path(args, "error.json"), message, "");
      std::cout << error_json(message, "");
      return 1;
    }
    const Pose tip =
        config.rod.base_pose * pose_at(config.rod, result.q, config.rod.length());
    std::vector<std::string> cells = {std::to_string(i)};
    for (int c = 0; c < config.cables.count(); ++c)
      cells.push_back(format_number(cases[i].tensions[c]));
    cells.push_back(format_number(tip.translation.x()));
    cells.push_back(format_number(tip.translation.y()));
    cells.push_back(format_number(tip.translation.z()));
    cells.push_back(std::to_string(result.iterations));
    cells.push_back(format_number(result.residual_norm));
    summary << csv_line(cells);

    write_centerline_csv(out_path(args, case_name("sweep", static_cast<int>(i))),
                         config.rod, result.q, cmd.centerline_samples);
  }
  return 0;
}

int run_dynamic(const CliArgs& args, const ProjectConfig& config) {
  if (!config.dynamic_command) throw_missing_block("dynamic");
  const DynamicCommand& cmd = *config.dynamic_command;
  const Eigen::VectorXd q_rest = straight_configuration(config.rod);
  const Eigen::VectorXd qdot0 = Eigen::VectorXd::Zero(config.rod.dof());

  const SimulationResult result =
      simulate(config.rod, config.cables, cmd.schedule, config.gravity, q_rest,
               qdot0, q_rest, cmd.options);
  write_trajectory_csv(out_path(args, "trajectory.csv"), result);
  write_energy_json(out_path(args, "energy.json"), result);
  return 0;
}

int run_compare(const CliArgs& args, const ProjectConfig& config) {
  if (!config.compare_command) throw_missing_block("compare");
  const CompareCommand& cmd = *config.compare_command;
  const Eigen::VectorXd q_rest = straight_configuration(config.rod);

  auto stream = std::ofstream(out_path(args, "compare.csv"), std::ios::binary);
  stream << csv_line({"model", "tip_x_m", "tip_y_m", "tip_z_m", "error_m",
                      "error_rel"});
  if (cmd.reference_tip) {
    const Eigen::Vector3d& ref = *cmd.reference_tip;
    stream << csv_line({"reference", format_number(ref.x()), format_number(ref.y()),
                        format_number(ref.z()), format_number(0.0),
                        format_number(0.0)});
  }

  for (const std::string& model : cmd.models) {
    Eigen::Vector3d tip;
    if (model == "pcs") {
      const StaticResult result = solve_static_pcs(config.rod, config.cables,
                                                   cmd.loads, nullptr, cmd.options);
      if (!result.converged) {
        const std::string message = "model " + model + " failed: " + result.message;
        std::cerr << message << "\n";
        write_error_json(out_path(args, "error.json"), message, "");
        std::cout << error_json(message, "");
        return 1;
      }
      tip = (config.rod.base_pose *
             pcs_pose_at(config.rod, result.q, config.rod.length()))
                .translation;
    } else {
      const ModeSelection selection =
          make_selection(model == "pls" ? std::string("full") : model);
      const StaticResult result = solve_static(config.rod, config.cables, cmd.loads,
                                               selection, q_rest, nullptr,
                                               cmd.options);
      if (!result.converged) {
        const std::string message = "model " + model + " failed: " + result.message;
        std::cerr << message << "\n";
        write_error_json(out_path(args, "error.json"), message, "");
        std::cout << error_json(message, "");
        return 1;
      }
      tip = (config.rod.base_pose *
             pose_at(config.rod, result.q, config.rod.length()))
                .translation;
    }

    std::vector<std::string> cells = {model, format_number(tip.x()),
                                      format_number(tip.y()),
                                      format_number(tip.z())};
    if (cmd.reference_tip) {
      const double error = (tip - *cmd.reference_tip).norm();
      cells.push_back(format_number(error));
      cells.push_back(format_number(error / cmd.reference_tip->norm()));
    } else {
      cells.push_back("");
      cells.push_back("");
    }
    stream << csv_line(cells);
  }
  return 0;
}

int run_identify(const CliArgs& args, const ProjectConfig& config) {
  if (!config.identify_command) throw_missing_block("identify");
  IdentifyCommand cmd = *config.identify_command;
  cmd.options.seed = args.seed;

  const IdentificationResult result =
      identify(config.rod, config.cables, config.gravity, cmd.experiments,
               cmd.initial, cmd.options);
  if (result.model_tips.empty()) {
    const std::string message = "identification failed: " + result.message;
    std::cerr << message << "\n";
    write_error_json(out_path(args, "error.json"), message, "");
    std::cout << error_json(message, "");
    return 1;
  }

  std::vector<double> errors;
  for (size_t i = 0; i < cmd.experiments.size(); ++i)
    errors.push_back((result.model_tips[i] - cmd.experiments[i].tip).norm());
  write_identify_json(out_path(args, "identify.json"), result, errors);
  return 0;
}

int run_validate(const CliArgs& args, const ProjectConfig& config) {
  if (!config.validate_command) throw_missing_block("validate");
  const ValidateCommand& cmd = *config.validate_command;
  const Eigen::Vector3d theta(config.rod.material.young_modulus,
                              config.rod.material.shear_modulus,
                              config.rod.material.density);
  const ValidationReport report = validate_tips(
      config.rod, config.cables, config.gravity, cmd.experiments, theta, cmd.options);

  auto stream = std::ofstream(out_path(args, "validate.csv"), std::ios::binary);
  std::vector<std::string> header = {"experiment"};
  for (int c = 0; c < config.cables.count(); ++c)
    header.push_back("T" + std::to_string(c + 1) + "_n");
  for (const char* name : {"model_x_m", "model_y_m", "model_z_m", "measured_x_m",
                           "measured_y_m", "measured_z_m", "error_m"})
    header.push_back(name);
  stream << csv_line(header);

  for (size_t i = 0; i < cmd.experiments.size(); ++i) {
    const Experiment& exp = cmd.experiments[i];
    std::vector<std::string> cells = {std::to_string(i)};
    for (int c = 0; c < exp.tensions.size(); ++c)
      cells.push_back(format_number(exp.tensions[c]));
    const Eigen::Vector3d& tip = report.model_tips[i];
    cells.push_back(format_number(tip.x()));
    cells.push_back(format_number(tip.y()));
    cells.push_back(format_number(tip.z()));
    cells.push_back(format_number(exp.tip.x()));
    cells.push_back(format_number(exp.tip.y()));
    cells.push_back(format_number(exp.tip.z()));
    cells.push_back(format_number(report.errors[i]));
    stream << csv_line(cells);
  }
  return 0;
}

int dispatch(const CliArgs& args) {
  fs::create_directories(args.out_dir);
  ProjectConfig config = load_config(args.config_path);

  if (args.segments > 0) {
    config.rod.partition.segments_per_section = args.segments;
    config.rod.validate();
  }
  if (args.quadrature > 0) {
    if (config.static_command)
      config.static_command->options.quadrature_order = args.quadrature;
    if (config.sweep_command)
      config.sweep_command->options.quadrature_order = args.quadrature;
    if (config.dynamic_command)
      config.dynamic_command->options.quadrature_order = args.quadrature;
    if (config.compare_command)
      config.compare_command->options.quadrature_order = args.quadrature;
    if (config.identify_command)
      config.identify_command->options.static_options.quadrature_order =
          args.quadrature;
    if (config.validate_command)
      config.validate_command->options.quadrature_order = args.quadrature;
  }

  if (args.command == "static") return run_static(args, config);
  if (args.command == "sweep") return run_sweep(args, config);
  if (args.command == "dynamic") return run_dynamic(args, config);
  if (args.command == "compare") return run_compare(args, config);
  if (args.command == "identify") return run_identify(args, config);
  return run_validate(args, config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Piecewise-linear-strain Cosserat rod toolkit"};
  app.require_subcommand(1);

  CliArgs args;
  for (const char* name :
       {"static", "sweep", "dynamic", "compare", "identify", "validate"}) {
    CLI::App* sub = app.add_subcommand(
        name, std::string("run the ") + name + " command from the config");
    sub->add_option("--config", args.config_path, "config file (JSON)")
        ->required();
    sub->add_option("--out", args.out_dir, "output directory")->required();
    sub->add_option("--seed", args.seed, "seed for optional multistart draws");
    sub->add_option("--quadrature", args.quadrature,
                    "override the per-segment quadrature order");
    sub->add_option("--segments", args.segments,
                    "override the segments per section");
    sub->callback([&args, name] { args.command = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    return dispatch(args);
  } catch (const plsrod::ConfigError& e) {
    std::cerr << e.what() << "\n";
    std::cout << plsrod::error_json(e.what(), e.field());
    try {
      plsrod::write_error_json(
          (fs::path(args.out_dir) / "error.json").string(), e.what(), e.field());
    } catch (...) {
    }
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    std::cout << plsrod::error_json(e.what(), "");
    try {
      plsrod::write_error_json(
          (fs::path(args.out_dir) / "error.json").string(), e.what(), "");
    } catch (...) {
    }
    return 1;
  }
}
