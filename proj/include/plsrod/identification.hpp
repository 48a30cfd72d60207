#pragma once

#include <optional>

#include "plsrod/statics.hpp"

namespace plsrod {

// One standing measurement: tensions applied, tip position recorded (m,
// world frame).
struct Experiment {
  Eigen::VectorXd tensions;
  Eigen::Vector3d tip = Eigen::Vector3d::Zero();
};

struct MaterialBounds {
  double young_min = 1e4;
  double young_max = 1e7;
  double shear_min = 1e3;
  double shear_max = 5e6;
  double density_min = 500.0;
  double density_max = 5000.0;
};

// Rod with the elastic parameters replaced (geometry and damping kept).
Rod with_material(const Rod& rod, double young_modulus, double shear_modulus,
                  double density);

// Standing model fitted to measured tip positions; keeps warm starts for the
// repeated inner solves, so one instance is not safe to share across threads.
class TipFitProblem {
 public:
  // `tip_marker` places the measured point in the tip frame (m); the model
  // prediction compared against each experiment is the marker position, not
  // the centerline endpoint.
  TipFitProblem(Rod rod, CableSet cables, Vector6d gravity,
                std::vector<Experiment> experiments, StaticOptions options,
                Eigen::Vector3d tip_marker = Eigen::Vector3d::Zero());

  struct Evaluation {
    bool ok = false;
    Eigen::VectorXd residuals;           // stacked model - measured, 3 per experiment
    double objective = 0.0;              // sum of Euclidean tip errors
    std::vector<Eigen::Vector3d> tips;   // model tip positions
  };

  // theta = (young modulus, shear modulus, density).
  Evaluation evaluate(const Eigen::Vector3d& theta);

  // Full-space equilibria cached from the last successful evaluation.
  const std::vector<Eigen::VectorXd>& equilibria() const { return equilibria_; }
  int experiment_count() const { return static_cast<int>(experiments_.size()); }
  const Rod& rod() const { return rod_; }
  const CableSet& cables() const { return cables_; }
  const Vector6d& gravity() const { return gravity_; }
  const std::vector<Experiment>& experiments() const { return experiments_; }
  const StaticOptions& options() const { return options_; }
  const Eigen::Vector3d& tip_marker() const { return tip_marker_; }

 private:
  Rod rod_;
  CableSet cables_;
  Vector6d gravity_;
  std::vector<Experiment> experiments_;
  StaticOptions options_;
  Eigen::Vector3d tip_marker_ = Eigen::Vector3d::Zero();
  std::vector<Eigen::VectorXd> warm_starts_;  // reduced coordinates
  std::vector<Eigen::VectorXd> equilibria_;
};

struct IdentifyOptions {
  MaterialBounds bounds;
  int max_iterations = 60;
  double objective_tolerance = 1e-12;  // relative decrease per iteration
  double step_tolerance = 1e-10;       // log-parameter step norm
  int multistart = 0;                  // extra seeded starts inside the bounds
  unsigned long long seed = 0;
  StaticOptions static_options;
  // Measured point in the tip frame (sensor marker mounting).
  Eigen::Vector3d tip_marker = Eigen::Vector3d::Zero();
};

struct IdentificationResult {
  double young_modulus = 0.0;
  double shear_modulus = 0.0;
  double density = 0.0;
  double objective_initial = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string message;
  std::vector<Eigen::Vector3d> model_tips;
};

// Minimizes the summed tip error over log-scaled bounded material parameters
// with an iteratively reweighted Levenberg-Marquardt loop; gradients come
// from central differences in the log parameters.
IdentificationResult identify(const Rod& rod, const CableSet& cables,
                              const Vector6d& gravity,
                              const std::vector<Experiment>& experiments,
                              const Eigen::Vector3d& theta_init,
                              const IdentifyOptions& options);

// Tip errors (m) of the standing model against each experiment.
struct ValidationReport {
  std::vector<Eigen::Vector3d> model_tips;
  std::vector<double> errors;
  double max_error = 0.0;
  double mean_error = 0.0;
};

ValidationReport validate_tips(const Rod& rod, const CableSet& cables,
                               const Vector6d& gravity,
                               const std::vector<Experiment>& experiments,
                               const Eigen::Vector3d& theta,
                               const StaticOptions& options,
                               const Eigen::Vector3d& tip_marker =
                                   Eigen::Vector3d::Zero());

// First-order optimality of the constrained fit in the full space: adjoint
// multipliers are recovered from the equilibrium Jacobians and the remaining
// parameter-gradient norm is reported together with the constraint defect.
struct KktReport {
  double stationarity = 0.0;      // norm of the reduced parameter gradient
  double stationarity_scale = 0.0;  // magnitude of the summands forming it
  double constraint_norm = 0.0;   // max scaled equilibrium residual
};

KktReport kkt_residual(TipFitProblem& problem, const Eigen::Vector3d& theta);

}  // namespace plsrod
