#include "plsrod/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "plsrod/reduction.hpp"

namespace plsrod {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field, what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void expect_object(const json& j, const std::string& path,
                   std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    if (!known) fail(join(path, it.key()), "unknown key");
  }
}

const json* find(const json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

bool as_boolean(const json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

double require_number(const json& j, const char* key, const std::string& path) {
  const json* v = find(j, key);
  if (!v) fail(join(path, key), "missing required key");
  return as_number(*v, join(path, key));
}

double number_or(const json& j, const char* key, const std::string& path,
                 double fallback) {
  const json* v = find(j, key);
  return v ? as_number(*v, join(path, key)) : fallback;
}

int integer_or(const json& j, const char* key, const std::string& path,
               int fallback) {
  const json* v = find(j, key);
  return v ? as_integer(*v, join(path, key)) : fallback;
}

bool boolean_or(const json& j, const char* key, const std::string& path,
                bool fallback) {
  const json* v = find(j, key);
  return v ? as_boolean(*v, join(path, key)) : fallback;
}

Eigen::VectorXd as_vector(const json& j, const std::string& path, int size) {
  if (!j.is_array()) fail(path, "expected an array");
  if (size >= 0 && static_cast<int>(j.size()) != size)
    fail(path, "expected " + std::to_string(size) + " entries");
  Eigen::VectorXd out(j.size());
  int i = 0;
  for (const auto& item : j)
    out[i] = as_number(item, path + "[" + std::to_string(i) + "]"), ++i;
  return out;
}

Eigen::VectorXd tensions_or_zero(const json& j, const char* key,
                                 const std::string& path, int cable_count) {
  const json* v = find(j, key);
  if (!v) return Eigen::VectorXd::Zero(cable_count);
  return as_vector(*v, join(path, key), cable_count);
}

Vector6d wrench_from(const json& j, const std::string& path) {
  Vector6d wrench = Vector6d::Zero();
  if (const json* m = find(j, "moment_nm"))
    wrench.head<3>() = as_vector(*m, join(path, "moment_nm"), 3);
  if (const json* f = find(j, "force_n"))
    wrench.tail<3>() = as_vector(*f, join(path, "force_n"), 3);
  return wrench;
}

Vector6d tip_wrench_from(const json& j, const std::string& path) {
  Vector6d wrench = Vector6d::Zero();
  if (const json* m = find(j, "tip_moment_nm"))
    wrench.head<3>() = as_vector(*m, join(path, "tip_moment_nm"), 3);
  if (const json* f = find(j, "tip_force_n"))
    wrench.tail<3>() = as_vector(*f, join(path, "tip_force_n"), 3);
  return wrench;
}

void read_static_options(const json& j, const std::string& path,
                         StaticOptions* options) {
  options->tolerance = number_or(j, "tolerance", path, options->tolerance);
  options->max_iterations =
      integer_or(j, "max_iterations", path, options->max_iterations);
  options->quadrature_order =
      integer_or(j, "quadrature_order", path, options->quadrature_order);
  options->allow_continuation =
      boolean_or(j, "continuation", path, options->allow_continuation);
}

int centerline_samples_from(const json& j, const std::string& path) {
  const int samples = integer_or(j, "centerline_samples", path, 201);
  if (samples < 2) fail(join(path, "centerline_samples"), "need at least 2");
  return samples;
}

double tip_unit_scale(const json& j, const std::string& path) {
  const json* v = find(j, "tip_unit");
  const std::string unit = v ? as_string(*v, join(path, "tip_unit")) : "m";
  if (unit == "m") return 1.0;
  if (unit == "cm") return 0.01;
  fail(join(path, "tip_unit"), "expected \"m\" or \"cm\"");
}

std::vector<Experiment> experiments_from(const json& j, const std::string& path,
                                         int cable_count,
                                         const std::filesystem::path& base_dir) {
  const double scale = tip_unit_scale(j, path);
  const json* inline_table = find(j, "experiments");
  const json* csv = find(j, "experiments_csv");
  if ((inline_table != nullptr) == (csv != nullptr))
    fail(path, "provide exactly one of experiments, experiments_csv");

  if (csv) {
    std::filesystem::path file(as_string(*csv, join(path, "experiments_csv")));
    if (file.is_relative()) file = base_dir / file;
    try {
      return load_experiments_csv(file.string(), cable_count, scale);
    } catch (const std::exception& e) {
      fail(join(path, "experiments_csv"), e.what());
    }
  }

  const std::string table_path = join(path, "experiments");
  if (!inline_table->is_array() || inline_table->empty())
    fail(table_path, "expected a non-empty array");
  std::vector<Experiment> experiments;
  int i = 0;
  for (const auto& row : *inline_table) {
    const std::string row_path = table_path + "[" + std::to_string(i) + "]";
    expect_object(row, row_path, {"tensions_n", "tip"});
    Experiment exp;
    const json* t = find(row, "tensions_n");
    if (!t) fail(join(row_path, "tensions_n"), "missing required key");
    exp.tensions = as_vector(*t, join(row_path, "tensions_n"), cable_count);
    const json* tip = find(row, "tip");
    if (!tip) fail(join(row_path, "tip"), "missing required key");
    exp.tip = scale * Eigen::Vector3d(as_vector(*tip, join(row_path, "tip"), 3));
    experiments.push_back(std::move(exp));
    ++i;
  }
  return experiments;
}

Rod rod_from(const json& j, bool* viscosity_specified) {
  const std::string path = "rod";
  expect_object(j, path,
                {"length_m", "base_radius_m", "tip_radius_m",
                 "young_modulus_pa", "shear_modulus_pa", "poisson_ratio",
                 "density_kg_m3", "viscosity_pa_s", "sections_m",
                 "segments_per_section", "segment_length_m", "rest_strain",
                 "base_translation_m", "base_quaternion_wxyz"});

  Rod rod;
  rod.profile.length = require_number(j, "length_m", path);
  rod.profile.base_radius = require_number(j, "base_radius_m", path);
  rod.profile.tip_radius = require_number(j, "tip_radius_m", path);

  rod.material.young_modulus = require_number(j, "young_modulus_pa", path);
  rod.material.density = require_number(j, "density_kg_m3", path);
  const json* shear = find(j, "shear_modulus_pa");
  const json* poisson = find(j, "poisson_ratio");
  if ((shear != nullptr) == (poisson != nullptr))
    fail(path, "provide exactly one of shear_modulus_pa, poisson_ratio");
  if (shear) {
    rod.material.shear_modulus = as_number(*shear, join(path, "shear_modulus_pa"));
  } else {
    const double nu = as_number(*poisson, join(path, "poisson_ratio"));
    rod.material.shear_modulus = rod.material.young_modulus / (2.0 * (1.0 + nu));
  }
  if (const json* mu = find(j, "viscosity_pa_s")) {
    rod.material.viscosity = as_number(*mu, join(path, "viscosity_pa_s"));
    *viscosity_specified = true;
  }

  const json* sections = find(j, "sections_m");
  if (!sections) fail(join(path, "sections_m"), "missing required key");
  const Eigen::VectorXd lengths = as_vector(*sections, join(path, "sections_m"), -1);
  if (lengths.size() == 0) fail(join(path, "sections_m"), "expected a non-empty array");
  rod.partition.bounds.assign(lengths.size() + 1, 0.0);
  double total = 0.0;
  for (int n = 0; n < lengths.size(); ++n) {
    if (lengths[n] <= 0.0)
      fail(join(path, "sections_m") + "[" + std::to_string(n) + "]",
           "section lengths must be positive");
    total += lengths[n];
    rod.partition.bounds[n + 1] = total;
  }
  if (std::abs(total - rod.profile.length) > 1e-9 * rod.profile.length)
    fail(join(path, "sections_m"), "section lengths must sum to length_m");
  rod.partition.bounds.back() = rod.profile.length;

  if (const json* segments = find(j, "segments_per_section")) {
    const std::string seg_path = join(path, "segments_per_section");
    const int k = as_integer(*segments, seg_path);
    if (k < 1) fail(seg_path, "need at least 1");
    rod.partition.segments_per_section = k;
  } else {
    // Default: the longest section meets the target segment length.
    const double target = number_or(j, "segment_length_m", path, 1e-3);
    if (target <= 0.0) fail(join(path, "segment_length_m"), "must be positive");
    double longest = 0.0;
    for (int n = 0; n < lengths.size(); ++n) longest = std::max(longest, lengths[n]);
    rod.partition.segments_per_section =
        std::max(1, static_cast<int>(std::ceil(longest / target - 1e-12)));
  }

  if (const json* rest = find(j, "rest_strain"))
    rod.rest_strain = as_vector(*rest, join(path, "rest_strain"), 6);
  if (const json* t = find(j, "base_translation_m"))
    rod.base_pose.translation = as_vector(*t, join(path, "base_translation_m"), 3);
  if (const json* quat = find(j, "base_quaternion_wxyz")) {
    const Eigen::VectorXd wxyz =
        as_vector(*quat, join(path, "base_quaternion_wxyz"), 4);
    Eigen::Quaterniond rotation(wxyz[0], wxyz[1], wxyz[2], wxyz[3]);
    if (rotation.norm() < 1e-12)
      fail(join(path, "base_quaternion_wxyz"), "zero quaternion");
    rod.base_pose.rotation = rotation.normalized().toRotationMatrix();
  }

  try {
    rod.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return rod;
}

CableSet cables_from(const json& j, double length) {
  const std::string path = "cables";
  expect_object(j, path, {"azimuth_deg", "base_offset_m", "tip_offset_m"});
  CableSet cables;
  const json* azimuth = find(j, "azimuth_deg");
  if (!azimuth) fail(join(path, "azimuth_deg"), "missing required key");
  const Eigen::VectorXd deg = as_vector(*azimuth, join(path, "azimuth_deg"), -1);
  cables.azimuth.resize(deg.size());
  for (int i = 0; i < deg.size(); ++i)
    cables.azimuth[i] = deg[i] * std::numbers::pi / 180.0;
  cables.base_offset = require_number(j, "base_offset_m", path);
  cables.tip_offset = require_number(j, "tip_offset_m", path);
  cables.length = length;
  try {
    cables.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return cables;
}

StaticCommand static_from(const json& j, const ProjectConfig& config) {
  const std::string path = "static";
  expect_object(j, path,
                {"tensions_n", "tip_moment_nm", "tip_force_n", "point_loads",
                 "tolerance", "max_iterations", "quadrature_order",
                 "continuation", "centerline_samples"});
  StaticCommand cmd;
  cmd.loads.gravity = config.gravity;
  cmd.loads.tensions = tensions_or_zero(j, "tensions_n", path, config.cables.count());
  cmd.loads.tip_wrench = tip_wrench_from(j, path);
  if (const json* loads = find(j, "point_loads")) {
    const std::string loads_path = join(path, "point_loads");
    if (!loads->is_array()) fail(loads_path, "expected an array");
    int i = 0;
    for (const auto& item : *loads) {
      const std::string item_path = loads_path + "[" + std::to_string(i) + "]";
      expect_object(item, item_path, {"x_m", "moment_nm", "force_n"});
      PointLoad load;
      load.x = require_number(item, "x_m", item_path);
      load.wrench = wrench_from(item, item_path);
      cmd.loads.point_loads.push_back(load);
      ++i;
    }
  }
  read_static_options(j, path, &cmd.options);
  cmd.centerline_samples = centerline_samples_from(j, path);
  try {
    cmd.loads.validate(config.cables, config.rod.length());
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return cmd;
}

SweepCommand sweep_from(const json& j, const ProjectConfig& config) {
  const std::string path = "sweep";
  expect_object(j, path,
                {"cases", "tensions_from_n", "tensions_to_n", "steps",
                 "tolerance", "max_iterations", "quadrature_order",
                 "continuation", "centerline_samples"});
  SweepCommand cmd;
  const int nc = config.cables.count();
  const json* cases = find(j, "cases");
  const json* from = find(j, "tensions_from_n");
  if (cases && from) fail(path, "provide either cases or a tension ramp, not both");
  if (cases) {
    const std::string cases_path = join(path, "cases");
    if (!cases->is_array() || cases->empty())
      fail(cases_path, "expected a non-empty array");
    int i = 0;
    for (const auto& item : *cases) {
      const std::string item_path = cases_path + "[" + std::to_string(i) + "]";
      expect_object(item, item_path, {"tensions_n"});
      const json* t = find(item, "tensions_n");
      if (!t) fail(join(item_path, "tensions_n"), "missing required key");
      cmd.tension_cases.push_back(as_vector(*t, join(item_path, "tensions_n"), nc));
      ++i;
    }
  } else {
    if (!from) fail(path, "provide either cases or a tension ramp");
    const json* to = find(j, "tensions_to_n");
    if (!to) fail(join(path, "tensions_to_n"), "missing required key");
    const Eigen::VectorXd start = as_vector(*from, join(path, "tensions_from_n"), nc);
    const Eigen::VectorXd stop = as_vector(*to, join(path, "tensions_to_n"), nc);
    const int steps = integer_or(j, "steps", path, 10);
    if (steps < 1) fail(join(path, "steps"), "need at least 1");
    for (int s = 0; s <= steps; ++s) {
      const double a = static_cast<double>(s) / steps;
      cmd.tension_cases.push_back((1.0 - a) * start + a * stop);
    }
  }
  read_static_options(j, path, &cmd.options);
  cmd.centerline_samples = centerline_samples_from(j, path);
  return cmd;
}

DynamicCommand dynamic_from(const json& j, const ProjectConfig& config) {
  const std::string path = "dynamic";
  expect_object(j, path,
                {"duration_s", "dt_s", "tensions_n", "tensions_after_n",
                 "step_time_s", "output_stride", "quadrature_order"});
  DynamicCommand cmd;
  const int nc = config.cables.count();
  cmd.options.duration = require_number(j, "duration_s", path);
  cmd.options.dt = require_number(j, "dt_s", path);
  if (cmd.options.duration <= 0.0) fail(join(path, "duration_s"), "must be positive");
  if (cmd.options.dt <= 0.0) fail(join(path, "dt_s"), "must be positive");
  cmd.options.output_stride = integer_or(j, "output_stride", path, 1);
  if (cmd.options.output_stride < 1)
    fail(join(path, "output_stride"), "need at least 1");
  cmd.options.quadrature_order =
      integer_or(j, "quadrature_order", path, cmd.options.quadrature_order);

  cmd.schedule.before = tensions_or_zero(j, "tensions_n", path, nc);
  const json* after = find(j, "tensions_after_n");
  const json* when = find(j, "step_time_s");
  if ((after != nullptr) != (when != nullptr))
    fail(path, "tensions_after_n and step_time_s go together");
  if (after) {
    cmd.schedule.after = as_vector(*after, join(path, "tensions_after_n"), nc);
    cmd.schedule.step_time = as_number(*when, join(path, "step_time_s"));
    cmd.schedule.has_step = true;
    if (cmd.schedule.step_time <= 0.0)
      fail(join(path, "step_time_s"), "must be positive");
  } else {
    cmd.schedule.after = cmd.schedule.before;
  }
  return cmd;
}

CompareCommand compare_from(const json& j, const ProjectConfig& config) {
  const std::string path = "compare";
  expect_object(j, path,
                {"models", "tensions_n", "tip_moment_nm", "tip_force_n",
                 "reference_tip_m", "tolerance", "max_iterations",
                 "quadrature_order", "continuation", "centerline_samples"});
  CompareCommand cmd;
  const json* models = find(j, "models");
  if (!models) fail(join(path, "models"), "missing required key");
  if (!models->is_array() || models->empty())
    fail(join(path, "models"), "expected a non-empty array");
  int i = 0;
  for (const auto& item : *models) {
    const std::string item_path =
        join(path, "models") + "[" + std::to_string(i) + "]";
    const std::string name = as_string(item, item_path);
    if (name != "pls" && name != "pcs") {
      try {
        make_selection(name);
      } catch (const std::exception& e) {
        fail(item_path, e.what());
      }
    }
    cmd.models.push_back(name);
    ++i;
  }
  cmd.loads.gravity = config.gravity;
  cmd.loads.tensions = tensions_or_zero(j, "tensions_n", path, config.cables.count());
  cmd.loads.tip_wrench = tip_wrench_from(j, path);
  if (const json* ref = find(j, "reference_tip_m"))
    cmd.reference_tip = Eigen::Vector3d(as_vector(*ref, join(path, "reference_tip_m"), 3));
  read_static_options(j, path, &cmd.options);
  cmd.centerline_samples = centerline_samples_from(j, path);
  return cmd;
}

IdentifyCommand identify_from(const json& j, const ProjectConfig& config,
                              const std::filesystem::path& base_dir) {
  const std::string path = "identify";
  expect_object(j, path,
                {"experiments", "experiments_csv", "tip_unit",
                 "initial_young_modulus_pa", "initial_shear_modulus_pa",
                 "initial_density_kg_m3", "bounds", "max_iterations",
                 "multistart", "tolerance", "quadrature_order"});
  IdentifyCommand cmd;
  cmd.experiments = experiments_from(j, path, config.cables.count(), base_dir);
  cmd.initial[0] = require_number(j, "initial_young_modulus_pa", path);
  cmd.initial[1] = require_number(j, "initial_shear_modulus_pa", path);
  cmd.initial[2] = require_number(j, "initial_density_kg_m3", path);
  if ((cmd.initial.array() <= 0.0).any())
    fail(path, "initial material parameters must be positive");

  if (const json* bounds = find(j, "bounds")) {
    const std::string bounds_path = join(path, "bounds");
    expect_object(*bounds, bounds_path,
                  {"young_min_pa", "young_max_pa", "shear_min_pa",
                   "shear_max_pa", "density_min_kg_m3", "density_max_kg_m3"});
    MaterialBounds& b = cmd.options.bounds;
    b.young_min = number_or(*bounds, "young_min_pa", bounds_path, b.young_min);
    b.young_max = number_or(*bounds, "young_max_pa", bounds_path, b.young_max);
    b.shear_min = number_or(*bounds, "shear_min_pa", bounds_path, b.shear_min);
    b.shear_max = number_or(*bounds, "shear_max_pa", bounds_path, b.shear_max);
    b.density_min =
        number_or(*bounds, "density_min_kg_m3", bounds_path, b.density_min);
    b.density_max =
        number_or(*bounds, "density_max_kg_m3", bounds_path, b.density_max);
    if (b.young_min >= b.young_max || b.shear_min >= b.shear_max ||
        b.density_min >= b.density_max)
      fail(bounds_path, "lower bounds must fall below upper bounds");
  }
  cmd.options.max_iterations =
      integer_or(j, "max_iterations", path, cmd.options.max_iterations);
  cmd.options.multistart = integer_or(j, "multistart", path, 0);
  if (cmd.options.multistart < 0) fail(join(path, "multistart"), "must be >= 0");
  cmd.options.static_options.tolerance =
      number_or(j, "tolerance", path, cmd.options.static_options.tolerance);
  cmd.options.static_options.quadrature_order = integer_or(
      j, "quadrature_order", path, cmd.options.static_options.quadrature_order);
  return cmd;
}

ValidateCommand validate_from(const json& j, const ProjectConfig& config,
                              const std::filesystem::path& base_dir) {
  const std::string path = "validate";
  expect_object(j, path,
                {"experiments", "experiments_csv", "tip_unit", "tolerance",
                 "max_iterations", "quadrature_order"});
  ValidateCommand cmd;
  cmd.experiments = experiments_from(j, path, config.cables.count(), base_dir);
  read_static_options(j, path, &cmd.options);
  return cmd;
}

}  // namespace

ProjectConfig load_config(const std::string& path) {
  std::ifstream stream(path);
  if (!stream) fail("", "cannot open config file: " + path);
  json root;
  try {
    root = json::parse(stream, nullptr, true, true);  // allow // comments
  } catch (const json::parse_error& e) {
    fail("", std::string("invalid JSON: ") + e.what());
  }
  expect_object(root, "",
                {"rod", "cables", "gravity_m_s2", "mode", "static", "sweep",
                 "dynamic", "compare", "identify", "validate"});

  ProjectConfig config;
  const json* rod = find(root, "rod");
  if (!rod) fail("rod", "missing required key");
  config.rod = rod_from(*rod, &config.viscosity_specified);

  if (const json* cables = find(root, "cables"))
    config.cables = cables_from(*cables, config.rod.length());

  if (const json* gravity = find(root, "gravity_m_s2"))
    config.gravity =
        gravity_twist(Eigen::Vector3d(as_vector(*gravity, "gravity_m_s2", 3)));

  if (const json* mode = find(root, "mode")) {
    config.mode = as_string(*mode, "mode");
    try {
      make_selection(config.mode);
    } catch (const std::exception& e) {
      fail("mode", e.what());
    }
  }

  const std::filesystem::path base_dir =
      std::filesystem::path(path).parent_path();

  if (const json* j = find(root, "static"))
    config.static_command = static_from(*j, config);
  if (const json* j = find(root, "sweep"))
    config.sweep_command = sweep_from(*j, config);
  if (const json* j = find(root, "dynamic")) {
    if (!config.viscosity_specified)
      fail("rod.viscosity_pa_s", "required for the dynamic command");
    if (config.rod.material.viscosity <= 0.0)
      fail("rod.viscosity_pa_s", "must be positive for the dynamic command");
    config.dynamic_command = dynamic_from(*j, config);
  }
  if (const json* j = find(root, "compare"))
    config.compare_command = compare_from(*j, config);
  if (const json* j = find(root, "identify"))
    config.identify_command = identify_from(*j, config, base_dir);
  if (const json* j = find(root, "validate"))
    config.validate_command = validate_from(*j, config, base_dir);
  return config;
}

std::vector<Experiment> load_experiments_csv(const std::string& path,
                                             int cable_count,
                                             double unit_scale) {
  std::ifstream stream(path);
  if (!stream) throw std::runtime_error("cannot open experiments file: " + path);

  std::vector<Experiment> experiments;
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    // A header line is any line containing alphabetic characters.
    if (line.find_first_of("abcdefghijklmnopqrstuvwxyz"
                           "ABCDEFGHIJKLMNOPQRSTUVWXYZ") != std::string::npos &&
        experiments.empty())
      continue;

    std::vector<double> values;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": not a number: " + cell);
      }
    }
    if (static_cast<int>(values.size()) != cable_count + 3)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected " + std::to_string(cable_count + 3) +
                               " columns");
    Experiment exp;
    exp.tensions.resize(cable_count);
    for (int i = 0; i < cable_count; ++i) exp.tensions[i] = values[i];
    exp.tip = unit_scale * Eigen::Vector3d(values[cable_count],
                                           values[cable_count + 1],
                                           values[cable_count + 2]);
    experiments.push_back(std::move(exp));
  }
  if (experiments.empty())
    throw std::runtime_error(path + ": no experiment rows");
  return experiments;
}

}  // namespace plsrod
