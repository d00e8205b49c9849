#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace asyncmot {

/// Dense rows x cols cost matrix with a validity mask. Invalid entries are
/// never assigned. Lower cost is a better match.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  explicit CostMatrix(Eigen::MatrixXd costs);

  std::size_t rows() const { return static_cast<std::size_t>(costs_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(costs_.cols()); }

  double cost(std::size_t r, std::size_t c) const { return costs_(r, c); }
  bool valid(std::size_t r, std::size_t c) const { return valid_(r, c) != 0; }

  /// Throws ValidationError when `value` is not finite.
  void set(std::size_t r, std::size_t c, double value);
  void invalidate(std::size_t r, std::size_t c);

  const Eigen::MatrixXd& costs() const { return costs_; }

 private:
  Eigen::MatrixXd costs_;
  Eigen::Matrix<unsigned char, Eigen::Dynamic, Eigen::Dynamic> valid_;
};

struct AssignmentResult {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (row, col), ascending row
  std::vector<std::size_t> unmatched_rows;
  std::vector<std::size_t> unmatched_cols;

  double total_cost(const CostMatrix& m) const;
};

/// Minimum-cost one-to-one assignment. The solver first maximizes the number
/// of pairs on valid entries, then minimizes their total cost. Pairs whose
/// cost exceeds `gate` are demoted to unmatched afterwards.
AssignmentResult solve_assignment(const CostMatrix& costs, double gate);

}  // namespace asyncmot
