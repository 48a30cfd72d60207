#pragma once

#include "plsrod/actuation.hpp"
#include "plsrod/kinematics.hpp"

namespace plsrod {

struct AssemblyOptions {
  int quadrature_order = 4;
};

// Kinematic data at every quadrature abscissa (plus the tip), computed once
// per configuration and shared by all generalized integrals. Not safe to
// share across threads while being built.
struct AssemblyTable {
  QuadratureGrid grid;
  std::vector<PointState> points;
  PointState tip;
  bool has_rates = false;
};

// qdot may be null for static evaluations; when present the table carries
// velocities and Jacobian time derivatives.
AssemblyTable build_table(const Rod& rod, const Eigen::VectorXd& q,
                          const Eigen::VectorXd* qdot,
                          const AssemblyOptions& options);

// integral J^T M J dX over the rod; symmetric positive semi-definite,
// 6(N+1) square. The first 6N rows form the generalized mass matrix.
Eigen::MatrixXd mass_matrix(const Rod& rod, const AssemblyTable& table);

// -integral J^T (ad^T_{J qdot} M J - M Jdot) dX, full 6(N+1) rows; requires a
// table built with rates.
Eigen::MatrixXd coriolis_matrix(const Rod& rod, const AssemblyTable& table);

// Geometric stiffness/damping maps of the internal wrench: the generalized
// internal force equals stiffness * (q - q_rest) + damping * qdot.
struct StiffnessDamping {
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd damping;
};
StiffnessDamping stiffness_damping(const Rod& rod, const AssemblyTable& table);

// integral J^T M Ad^{-1}_{g(X)} dX * Ad^{-1}_{g_r}: maps an inertial
// acceleration twist to generalized forces, 6(N+1) x 6.
Eigen::MatrixXd gravity_map(const Rod& rod, const AssemblyTable& table);

// integral J^T (Lambda' - ad^T_xi Lambda) dX: maps tensions to generalized
// forces, 6(N+1) x n_c.
Eigen::MatrixXd actuation_map(const Rod& rod, const CableSet& cables,
                              const Eigen::VectorXd& q,
                              const AssemblyTable& table);

// Vector fast paths using the same quadrature as the matrix forms.
Eigen::VectorXd internal_force(const Rod& rod, const AssemblyTable& table,
                               const Eigen::VectorXd& q,
                               const Eigen::VectorXd* qdot,
                               const Eigen::VectorXd& q_rest);
Eigen::VectorXd gravity_force(const Rod& rod, const AssemblyTable& table,
                              const Vector6d& gravity);
Eigen::VectorXd actuation_force(const Rod& rod, const CableSet& cables,
                                const Eigen::VectorXd& q,
                                const AssemblyTable& table,
                                const Eigen::VectorXd& tensions);
Eigen::VectorXd point_load_force(const Rod& rod, const Eigen::VectorXd& q,
                                 const std::vector<PointLoad>& loads);
// C(q, qdot) qdot without forming the matrix.
Eigen::VectorXd coriolis_force(const Rod& rod, const AssemblyTable& table);

// Square system of the stacked equations of motion: the first 6N rows are the
// projected dynamics, the last 6 the differentiated tip boundary condition.
struct AssembledSystem {
  Eigen::MatrixXd mass;            // [M; Gamma]
  Eigen::MatrixXd damping;         // [C; sigma]
  Eigen::VectorXd forcing;         // [gravity + internal + point loads; 0]
  Eigen::MatrixXd input_map;       // [H; 0]
  Eigen::MatrixXd input_rate_map;  // [0; -Lambda(L)]
};

AssembledSystem assemble(const Rod& rod, const CableSet& cables,
                         const LoadCase& loads, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& qdot,
                         const Eigen::VectorXd& q_rest,
                         const AssemblyOptions& options);

// Piecewise-constant tension input with one optional step.
struct TensionSchedule {
  Eigen::VectorXd before;
  Eigen::VectorXd after;
  double step_time = 0.0;
  bool has_step = false;

  const Eigen::VectorXd& at(double t) const {
    return (has_step && t >= step_time) ? after : before;
  }
};

struct SimulationOptions {
  double dt = 1e-3;
  double duration = 1.0;
  int quadrature_order = 4;
  int output_stride = 1;
};

struct SimulationSample {
  double t = 0.0;
  Eigen::VectorXd q;
  Eigen::VectorXd qdot;
  Eigen::Vector3d tip = Eigen::Vector3d::Zero();  // world frame
  double kinetic = 0.0;
  double elastic = 0.0;
  double gravity_potential = 0.0;
  double total = 0.0;               // kinetic + elastic + gravity_potential
  double boundary_residual = 0.0;   // scaled tip boundary-condition defect
};

struct SimulationResult {
  std::vector<SimulationSample> samples;
};

// Replaces the tip node strain of q so the undifferentiated tip boundary
// condition holds for the given rates and tensions (small Newton solve).
Eigen::VectorXd project_tip_strain(const Rod& rod, const CableSet& cables,
                                   const Eigen::VectorXd& tensions,
                                   const Eigen::VectorXd& q,
                                   const Eigen::VectorXd& qdot,
                                   const Eigen::VectorXd& q_rest);

// Fixed-step integration of the assembled system, implicit in the linear
// stiffness/damping terms and explicit in the geometry. Requires positive
// material viscosity. Initial conditions are projected onto the tip boundary
// condition; tension steps apply the matching impulsive tip strain-rate jump.
SimulationResult simulate(const Rod& rod, const CableSet& cables,
                          const TensionSchedule& schedule,
                          const Vector6d& gravity,
                          const Eigen::VectorXd& q_init,
                          const Eigen::VectorXd& qdot_init,
                          const Eigen::VectorXd& q_rest,
                          const SimulationOptions& options);

// Row scales used to nondimensionalize wrench-valued residuals: bending
// stiffness over length for moment rows, axial stiffness for force rows.
Vector6d wrench_row_scales(const Rod& rod);

}  // namespace plsrod
