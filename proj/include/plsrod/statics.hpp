#pragma once

#include "plsrod/dynamics.hpp"
#include "plsrod/reduction.hpp"

namespace plsrod {

struct StaticOptions {
  double tolerance = 1e-8;     // on the scaled residual norm
  int max_iterations = 50;
  int quadrature_order = 4;
  int continuation_steps = 10;
  bool allow_continuation = true;
};

struct StaticResult {
  Eigen::VectorXd q;          // full-space node strains
  Eigen::VectorXd q_reduced;  // coordinates actually solved for
  bool converged = false;
  bool used_continuation = false;
  int iterations = 0;
  double residual_norm = 0.0;
  std::vector<double> residual_history;
  double condition_estimate = 0.0;
  std::string message;
};

// Scaled standing-equilibrium residual in the reduced coordinates: one block
// of interior rows per section plus the tip boundary rows. With the full
// selection this is the unreduced system.
Eigen::VectorXd static_residual(const Rod& rod, const CableSet& cables,
                                const LoadCase& loads,
                                const ModeSelection& selection,
                                const Eigen::VectorXd& q_reduced,
                                const Eigen::VectorXd& q_rest,
                                int quadrature_order);

// Damped Newton iteration with a central-difference Jacobian; on failure one
// retry ramps all loads up over `continuation_steps` stages. `q_guess` (in
// reduced coordinates) may be null to start from the rest configuration.
StaticResult solve_static(const Rod& rod, const CableSet& cables,
                          const LoadCase& loads,
                          const ModeSelection& selection,
                          const Eigen::VectorXd& q_rest,
                          const Eigen::VectorXd* q_guess,
                          const StaticOptions& options);

// Reaction wrench carried by the constrained strain components at the tip:
// the constrained-row projection of (tip wrench - Lambda(L) T). Empty for the
// full selection.
Eigen::VectorXd tip_constrained_wrench(const Rod& rod, const CableSet& cables,
                                       const LoadCase& loads,
                                       const ModeSelection& selection,
                                       const Eigen::VectorXd& q);

// Sequence of standing solves, each warm-started from the previous solution.
std::vector<StaticResult> solve_sweep(const Rod& rod, const CableSet& cables,
                                      const std::vector<LoadCase>& cases,
                                      const ModeSelection& selection,
                                      const Eigen::VectorXd& q_rest,
                                      const StaticOptions& options);

// --- piecewise-constant-strain baseline -----------------------------------

// Residual of the baseline with one constant strain per section (6N rows).
Eigen::VectorXd pcs_static_residual(const Rod& rod, const CableSet& cables,
                                    const LoadCase& loads,
                                    const Eigen::VectorXd& q_pcs,
                                    int quadrature_order);

// Newton solve of the baseline; result.q holds the 6N section strains.
StaticResult solve_static_pcs(const Rod& rod, const CableSet& cables,
                              const LoadCase& loads,
                              const Eigen::VectorXd* q_guess,
                              const StaticOptions& options);

}  // namespace plsrod
