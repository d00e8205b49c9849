#include "asyncmot/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "asyncmot/errors.hpp"

namespace asyncmot {

CostMatrix::CostMatrix(std::size_t rows, std::size_t cols, double fill)
    : costs_(Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(rows),
                                       static_cast<Eigen::Index>(cols), fill)),
      valid_(decltype(valid_)::Ones(static_cast<Eigen::Index>(rows),
                                    static_cast<Eigen::Index>(cols))) {
  if (!std::isfinite(fill)) throw ValidationError("cost matrix fill value must be finite");
}

CostMatrix::CostMatrix(Eigen::MatrixXd costs)
    : costs_(std::move(costs)), valid_(decltype(valid_)::Ones(costs_.rows(), costs_.cols())) {
  if (!costs_.allFinite()) throw ValidationError("cost matrix entries must be finite");
}

void CostMatrix::set(std::size_t r, std::size_t c, double value) {
  if (!std::isfinite(value)) throw ValidationError("cost matrix entries must be finite");
  costs_(r, c) = value;
  valid_(r, c) = 1;
}

void CostMatrix::invalidate(std::size_t r, std::size_t c) {
  costs_(r, c) = 0.0;
  valid_(r, c) = 0;
}

double AssignmentResult::total_cost(const CostMatrix& m) const {
  double total = 0.0;
  for (const auto& [r, c] : pairs) total += m.cost(r, c);
  return total;
}

namespace {

// Shortest augmenting path Hungarian method with row/column potentials for an
// n x m problem with n <= m. Returns the column assigned to each row.
std::vector<std::size_t> hungarian(const Eigen::MatrixXd& a) {
  const std::size_t n = static_cast<std::size_t>(a.rows());
  const std::size_t m = static_cast<std::size_t>(a.cols());
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based indexing; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) -
                           u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

AssignmentResult solve_assignment(const CostMatrix& costs, double gate) {
  if (!std::isfinite(gate)) throw ValidationError("assignment gate must be finite");
  const std::size_t rows = costs.rows();
  const std::size_t cols = costs.cols();
  AssignmentResult result;

  std::vector<char> row_used(rows, 0), col_used(cols, 0);
  bool any_valid = false;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (!costs.valid(r, c)) continue;
      any_valid = true;
      lo = std::min(lo, costs.cost(r, c));
      hi = std::max(hi, costs.cost(r, c));
    }
  }

  if (any_valid) {
    // Invalid entries get a penalty larger than any full assignment's spread
    // of valid costs, so the solver maximizes the number of valid pairs first.
    const std::size_t k = std::min(rows, cols);
    const double penalty = hi + (hi - lo + 1.0) * static_cast<double>(k + 1);
    const bool transpose = rows > cols;
    const Eigen::Index n = static_cast<Eigen::Index>(transpose ? cols : rows);
    const Eigen::Index m = static_cast<Eigen::Index>(transpose ? rows : cols);
    Eigen::MatrixXd work(n, m);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        const std::size_t r = static_cast<std::size_t>(transpose ? j : i);
        const std::size_t c = static_cast<std::size_t>(transpose ? i : j);
        work(i, j) = costs.valid(r, c) ? costs.cost(r, c) : penalty;
      }
    }
    const auto assigned = hungarian(work);
    for (std::size_t i = 0; i < assigned.size(); ++i) {
      const std::size_t r = transpose ? assigned[i] : i;
      const std::size_t c = transpose ? i : assigned[i];
      if (!costs.valid(r, c) || costs.cost(r, c) > gate) continue;
      result.pairs.emplace_back(r, c);
      row_used[r] = 1;
      col_used[c] = 1;
    }
    std::sort(result.pairs.begin(), result.pairs.end());
  }

  for (std::size_t r = 0; r < rows; ++r) {
    if (!row_used[r]) result.unmatched_rows.push_back(r);
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (!col_used[c]) result.unmatched_cols.push_back(c);
  }
  return result;
}

}  // namespace asyncmot
