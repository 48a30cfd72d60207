#pragma once

#include <vector>

#include "plsrod/rod_model.hpp"

namespace plsrod {

// One integration segment of the kinematic sweep: strain and interpolation
// weights are frozen at the left endpoint so the pose advances by an exact
// screw exponential across the segment.
struct SegmentSpan {
  int section = 0;
  double x0 = 0.0;
  double x1 = 0.0;
  double alpha = 0.0;  // left-node weight frozen at x0
  double beta = 0.0;   // right-node weight frozen at x0
};

// All segments of a partition, base to tip.
std::vector<SegmentSpan> build_segments(const Partition& partition);

// Index of the segment owning abscissa x; points exactly on a segment
// boundary belong to the segment ending there (x = 0 belongs to the first).
int segment_of(const std::vector<SegmentSpan>& segments, double x);

// Quantities evaluated at one abscissa during a sweep. Which members are
// filled depends on the SweepRequest flags.
struct PointState {
  double x = 0.0;
  int section = 0;
  double wa = 0.0;  // exact left-node interpolation weight at x
  double wb = 0.0;  // exact right-node interpolation weight at x
  Pose pose;        // relative to the base frame
  Vector6d strain = Vector6d::Zero();
  Vector6d velocity = Vector6d::Zero();              // eta(x)
  Vector6d acceleration = Vector6d::Zero();          // eta_dot(x)
  Vector6d velocity_remainder = Vector6d::Zero();    // Jdot(x) * qdot
  Eigen::MatrixXd jacobian;      // 6 x dof, empty unless requested
  Eigen::MatrixXd jacobian_dot;  // 6 x dof, empty unless requested
};

struct SweepRequest {
  bool jacobian = false;
  bool jacobian_dot = false;
  bool velocity = false;      // requires qdot
  bool acceleration = false;  // requires qdot and qddot
  // Quadrature order of the per-segment convolution integrals entering
  // jacobian_dot / acceleration.
  int convolution_order = 4;
};

// Evaluates the rod state at each abscissa in ascending order with a single
// base-to-tip sweep. Abscissae must be sorted and lie in [0, L]. qdot/qddot
// may be null when the request does not need them.
std::vector<PointState> sweep(const Rod& rod, const Eigen::VectorXd& q,
                              const Eigen::VectorXd* qdot,
                              const Eigen::VectorXd* qddot,
                              const std::vector<double>& abscissae,
                              const SweepRequest& request);

// Convenience single-point wrappers (each runs its own sweep).
Pose pose_at(const Rod& rod, const Eigen::VectorXd& q, double x);
Vector6d velocity_at(const Rod& rod, const Eigen::VectorXd& q,
                     const Eigen::VectorXd& qdot, double x);
Vector6d acceleration_at(const Rod& rod, const Eigen::VectorXd& q,
                         const Eigen::VectorXd& qdot,
                         const Eigen::VectorXd& qddot, double x);
// Maps node strain rates to the body velocity at x: eta = J(q, x) qdot.
Eigen::MatrixXd strain_jacobian(const Rod& rod, const Eigen::VectorXd& q,
                                double x);
// Time derivative of the strain Jacobian along (q, qdot).
Eigen::MatrixXd strain_jacobian_dot(const Rod& rod, const Eigen::VectorXd& q,
                                    const Eigen::VectorXd& qdot, double x);

// Uniformly spaced poses (base-relative) including both endpoints.
std::vector<PointState> centerline(const Rod& rod, const Eigen::VectorXd& q,
                                   int samples);

// Gauss-Legendre rule on [-1, 1]; order in [2, 16].
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
QuadratureRule gauss_legendre(int order);

// Per-segment composite quadrature grid over the whole rod: abscissae and
// weights such that integral f dX ~= sum w_i f(x_i).
struct QuadratureGrid {
  std::vector<double> abscissae;
  std::vector<double> weights;
};
QuadratureGrid quadrature_grid(const Partition& partition, int order);

// --- piecewise-constant-strain baseline -----------------------------------

// Pose under one constant strain per section (q_pcs has 6 rows per section).
Pose pcs_pose_at(const Rod& rod, const Eigen::VectorXd& q_pcs, double x);

// Body velocity map for the piecewise-constant model: 6 x 6N.
Eigen::MatrixXd pcs_strain_jacobian(const Rod& rod,
                                    const Eigen::VectorXd& q_pcs, double x);

}  // namespace plsrod
