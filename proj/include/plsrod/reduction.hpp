#pragma once

#include <string>
#include <vector>

#include "plsrod/se3.hpp"

namespace plsrod {

// Complementary 0/1 column selections splitting the six strain components
// (K_x, K_y, K_z, Q_x, Q_y, Q_z) into allowed and constrained sets.
struct ModeSelection {
  Eigen::MatrixXd allowed;      // 6 x n_i
  Eigen::MatrixXd constrained;  // 6 x (6 - n_i)
  std::vector<int> allowed_rows;

  int allowed_count() const { return static_cast<int>(allowed.cols()); }
  bool is_full() const { return allowed_count() == 6; }
};

// Builds the selection for ascending strain-component rows (0-based).
ModeSelection selection_from_rows(const std::vector<int>& rows);

// Accepts "full", "euler_bernoulli", "extensible_kirchhoff", "timoshenko", or
// a 6-character 0/1 mask ordered (K_x, K_y, K_z, Q_x, Q_y, Q_z) where '1'
// keeps the component free. Throws std::invalid_argument otherwise.
ModeSelection make_selection(const std::string& mode);

// Node-wise expansion q = kron(I, B_a) q_reduced + kron(I, B_c B_c^T) q_rest.
Eigen::VectorXd lift(const ModeSelection& selection,
                     const Eigen::VectorXd& q_reduced,
                     const Eigen::VectorXd& q_rest);

// Node-wise projection kron(I, B_a)^T q.
Eigen::VectorXd reduce(const ModeSelection& selection,
                       const Eigen::VectorXd& q_full);

}  // namespace plsrod
