#include "plsrod/reduction.hpp"

#include <algorithm>
#include <stdexcept>

namespace plsrod {

ModeSelection selection_from_rows(const std::vector<int>& rows) {
  if (rows.empty()) {
    throw std::invalid_argument("selection needs at least one free component");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] > 5 || (i > 0 && rows[i] <= rows[i - 1])) {
      throw std::invalid_argument("selection rows must ascend within 0..5");
    }
  }
  ModeSelection sel;
  sel.allowed_rows = rows;
  sel.allowed = Eigen::MatrixXd::Zero(6, static_cast<int>(rows.size()));
  sel.constrained = Eigen::MatrixXd::Zero(6, 6 - static_cast<int>(rows.size()));
  int free_col = 0;
  int locked_col = 0;
  for (int r = 0; r < 6; ++r) {
    if (std::find(rows.begin(), rows.end(), r) != rows.end()) {
      sel.allowed(r, free_col++) = 1.0;
    } else {
      sel.constrained(r, locked_col++) = 1.0;
    }
  }
  return sel;
}

ModeSelection make_selection(const std::string& mode) {
  if (mode == "full") {
    return selection_from_rows({0, 1, 2, 3, 4, 5});
  }
  if (mode == "euler_bernoulli") {
    return selection_from_rows({1, 2});
  }
  if (mode == "extensible_kirchhoff") {
    return selection_from_rows({0, 1, 2, 3});
  }
  if (mode == "timoshenko") {
    return selection_from_rows({1, 2, 4, 5});
  }
  if (mode.size() == 6 &&
      mode.find_first_not_of("01") == std::string::npos) {
    std::vector<int> rows;
    for (int r = 0; r < 6; ++r) {
      if (mode[r] == '1') {
        rows.push_back(r);
      }
    }
    return selection_from_rows(rows);
  }
  throw std::invalid_argument("unknown strain mode: " + mode);
}

Eigen::VectorXd lift(const ModeSelection& selection,
                     const Eigen::VectorXd& q_reduced,
                     const Eigen::VectorXd& q_rest) {
  const int ni = selection.allowed_count();
  if (q_rest.size() % 6 != 0 || q_reduced.size() % ni != 0 ||
      q_reduced.size() / ni != q_rest.size() / 6) {
    throw std::invalid_argument("lift: inconsistent coordinate sizes");
  }
  const int nodes = static_cast<int>(q_rest.size()) / 6;
  Eigen::VectorXd q(q_rest.size());
  for (int i = 0; i < nodes; ++i) {
    q.segment<6>(6 * i) =
        selection.allowed * q_reduced.segment(ni * i, ni) +
        selection.constrained *
            (selection.constrained.transpose() * q_rest.segment<6>(6 * i));
  }
  return q;
}

Eigen::VectorXd reduce(const ModeSelection& selection,
                       const Eigen::VectorXd& q_full) {
  if (q_full.size() % 6 != 0) {
    throw std::invalid_argument("reduce: coordinate size not a multiple of 6");
  }
  const int ni = selection.allowed_count();
  const int nodes = static_cast<int>(q_full.size()) / 6;
  Eigen::VectorXd q(ni * nodes);
  for (int i = 0; i < nodes; ++i) {
    q.segment(ni * i, ni) =
        selection.allowed.transpose() * q_full.segment<6>(6 * i);
  }
  return q;
}

}  // namespace plsrod
