#include "plsrod/output.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "plsrod/kinematics.hpp"

namespace plsrod {

namespace {

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream stream(path, std::ios::binary);  // no newline translation
  if (!stream) throw std::runtime_error("cannot write file: " + path);
  return stream;
}

}  // namespace

std::string format_number(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string line;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  line += '\n';
  return line;
}

void write_centerline_csv(const std::string& path, const Rod& rod,
                          const Eigen::VectorXd& q, int samples) {
  auto stream = open_or_throw(path);
  stream << "X_m,x_m,y_m,z_m,qw,qx,qy,qz\n";

  Eigen::Quaterniond previous = Eigen::Quaterniond::Identity();
  bool first = true;
  for (const PointState& point : centerline(rod, q, samples)) {
    const Pose world = rod.base_pose * point.pose;
    Eigen::Quaterniond rotation(world.rotation);
    if (first ? rotation.w() < 0.0 : rotation.dot(previous) < 0.0)
      rotation.coeffs() = -rotation.coeffs();
    previous = rotation;
    first = false;
    stream << csv_line({format_number(point.x), format_number(world.translation.x()),
                        format_number(world.translation.y()),
                        format_number(world.translation.z()),
                        format_number(rotation.w()), format_number(rotation.x()),
                        format_number(rotation.y()), format_number(rotation.z())});
  }
}

void write_static_json(const std::string& path, const Rod& rod,
                       const StaticResult& result) {
  const Pose tip = rod.base_pose * pose_at(rod, result.q, rod.length());
  Eigen::Quaterniond rotation(tip.rotation);
  if (rotation.w() < 0.0) rotation.coeffs() = -rotation.coeffs();

  nlohmann::json doc;
  doc["tip_m"] = {tip.translation.x(), tip.translation.y(), tip.translation.z()};
  doc["tip_quaternion_wxyz"] = {rotation.w(), rotation.x(), rotation.y(),
                                rotation.z()};
  doc["converged"] = result.converged;
  doc["used_continuation"] = result.used_continuation;
  doc["iterations"] = result.iterations;
  doc["residual_norm"] = result.residual_norm;
  doc["condition_estimate"] = result.condition_estimate;
  doc["message"] = result.message;

  auto stream = open_or_throw(path);
  stream << doc.dump(2) << '\n';
}

void write_trajectory_csv(const std::string& path,
                          const SimulationResult& result) {
  auto stream = open_or_throw(path);
  std::vector<std::string> header = {"t_s", "tip_x_m", "tip_y_m", "tip_z_m"};
  const int dof =
      result.samples.empty() ? 0 : static_cast<int>(result.samples.front().q.size());
  for (int i = 0; i < dof; ++i) header.push_back("q" + std::to_string(i));
  stream << csv_line(header);

  for (const SimulationSample& sample : result.samples) {
    std::vector<std::string> cells = {
        format_number(sample.t), format_number(sample.tip.x()),
        format_number(sample.tip.y()), format_number(sample.tip.z())};
    for (int i = 0; i < dof; ++i) cells.push_back(format_number(sample.q[i]));
    stream << csv_line(cells);
  }
}

void write_energy_json(const std::string& path, const SimulationResult& result) {
  nlohmann::json doc;
  auto& t = doc["t_s"] = nlohmann::json::array();
  auto& kinetic = doc["kinetic_j"] = nlohmann::json::array();
  auto& elastic = doc["elastic_j"] = nlohmann::json::array();
  auto& gravity = doc["gravity_potential_j"] = nlohmann::json::array();
  auto& total = doc["total_j"] = nlohmann::json::array();
  auto& boundary = doc["boundary_residual"] = nlohmann::json::array();
  for (const SimulationSample& sample : result.samples) {
    t.push_back(sample.t);
    kinetic.push_back(sample.kinetic);
    elastic.push_back(sample.elastic);
    gravity.push_back(sample.gravity_potential);
    total.push_back(sample.total);
    boundary.push_back(sample.boundary_residual);
  }
  auto stream = open_or_throw(path);
  stream << doc.dump(2) << '\n';
}

void write_identify_json(const std::string& path,
                         const IdentificationResult& result,
                         const std::vector<double>& errors) {
  nlohmann::json doc;
  doc["young_modulus_pa"] = result.young_modulus;
  doc["shear_modulus_pa"] = result.shear_modulus;
  doc["density_kg_m3"] = result.density;
  doc["objective_m"] = result.objective;
  doc["objective_initial_m"] = result.objective_initial;
  doc["iterations"] = result.iterations;
  doc["converged"] = result.converged;
  doc["message"] = result.message;
  doc["per_experiment_error_m"] = errors;

  auto stream = open_or_throw(path);
  stream << doc.dump(2) << '\n';
}

std::string error_json(const std::string& message, const std::string& field) {
  nlohmann::json doc;
  doc["error"]["message"] = message;
  if (!field.empty()) doc["error"]["field"] = field;
  return doc.dump(2) + "\n";
}

void write_error_json(const std::string& path, const std::string& message,
                      const std::string& field) {
  auto stream = open_or_throw(path);
  stream << error_json(message, field);
}

}  // namespace plsrod
