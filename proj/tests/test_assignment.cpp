#include <gtest/gtest.h>

#include <random>

#include "asyncmot/assignment.hpp"
#include "asyncmot/errors.hpp"
#include "oracles.hpp"

using namespace asyncmot;

namespace {

CostMatrix from_rows(const std::vector<std::vector<double>>& rows) {
  CostMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m.set(i, j, rows[i][j]);
  }
  return m;
}

void expect_partition(const AssignmentResult& r, std::size_t rows, std::size_t cols) {
  EXPECT_EQ(r.pairs.size() + r.unmatched_rows.size(), rows);
  EXPECT_EQ(r.pairs.size() + r.unmatched_cols.size(), cols);
  std::vector<int> row_seen(rows, 0), col_seen(cols, 0);
  for (const auto& [i, j] : r.pairs) {
    ++row_seen[i];
    ++col_seen[j];
  }
  for (auto i : r.unmatched_rows) ++row_seen[i];
  for (auto j : r.unmatched_cols) ++col_seen[j];
  for (int c : row_seen) EXPECT_EQ(c, 1);
  for (int c : col_seen) EXPECT_EQ(c, 1);
}

}  // namespace

TEST(SolveAssignment, DiagonalExample) {
  const auto m = from_rows({{1, 2}, {2, 1}});
  const auto r = solve_assignment(m, 10.0);
  ASSERT_EQ(r.pairs.size(), 2u);
  EXPECT_EQ(r.pairs[0], std::make_pair(std::size_t{0}, std::size_t{0}));
  EXPECT_EQ(r.pairs[1], std::make_pair(std::size_t{1}, std::size_t{1}));
  EXPECT_DOUBLE_EQ(r.total_cost(m), 2.0);
}

TEST(SolveAssignment, TightGateDemotesEverything) {
  const auto m = from_rows({{1, 2}, {2, 1}});
  const auto r = solve_assignment(m, 0.5);
  EXPECT_TRUE(r.pairs.empty());
  EXPECT_EQ(r.unmatched_rows.size(), 2u);
  EXPECT_EQ(r.unmatched_cols.size(), 2u);
}

TEST(SolveAssignment, EmptyMatrices) {
  const auto r = solve_assignment(CostMatrix(1, 0), 1.0);
  EXPECT_TRUE(r.pairs.empty());
  ASSERT_EQ(r.unmatched_rows.size(), 1u);
  EXPECT_EQ(r.unmatched_rows[0], 0u);
  const auto c = solve_assignment(CostMatrix(0, 3), 1.0);
  EXPECT_EQ(c.unmatched_cols.size(), 3u);
}

TEST(SolveAssignment, TiesResolveToLowestIndices) {
  const auto m = from_rows({{1, 1}, {1, 1}});
  const auto r = solve_assignment(m, 10.0);
  ASSERT_EQ(r.pairs.size(), 2u);
  EXPECT_EQ(r.pairs[0].second, 0u);
  EXPECT_EQ(r.pairs[1].second, 1u);
}

TEST(CostMatrix, RejectsNonFiniteCosts) {
  CostMatrix m(1, 1);
  EXPECT_THROW(m.set(0, 0, std::numeric_limits<double>::infinity()), ValidationError);
  EXPECT_THROW(m.set(0, 0, std::nan("")), ValidationError);
}

TEST(SolveAssignment, InvalidEntriesNeverAssigned) {
  CostMatrix m = from_rows({{0, 5}, {1, 100}});
  m.invalidate(0, 1);
  m.invalidate(1, 1);
  const auto r = solve_assignment(m, 1000.0);
  // Only (0,0) and (1,0) are valid; one of them can be used.
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.pairs[0].second, 0u);
}

TEST(SolveAssignment, MatchesBruteForceOnRandomRectangular) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> dim(0, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t rows = static_cast<std::size_t>(dim(rng));
    const std::size_t cols = static_cast<std::size_t>(dim(rng));
    std::vector<std::vector<double>> c(rows, std::vector<double>(cols));
    std::vector<std::vector<bool>> v(rows, std::vector<bool>(cols));
    CostMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        c[i][j] = std::round(u(rng) * 1000.0);
        v[i][j] = u(rng) > 0.25;
        if (v[i][j]) {
          m.set(i, j, c[i][j]);
        } else {
          m.invalidate(i, j);
        }
      }
    }
    const auto r = solve_assignment(m, 1e9);
    const auto b = oracle::brute_force_assignment(c, v);
    expect_partition(r, rows, cols);
    EXPECT_EQ(r.pairs.size(), b.pairs);
    EXPECT_EQ(r.total_cost(m), b.cost);
    for (const auto& [i, j] : r.pairs) EXPECT_TRUE(v[i][j]);
  }
}

TEST(SolveAssignment, GateMonotonicity) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    CostMatrix m(5, 4);
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = 0; j < 4; ++j) m.set(i, j, u(rng));
    }
    std::size_t prev = 0;
    for (double gate : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0}) {
      const auto r = solve_assignment(m, gate);
      EXPECT_GE(r.pairs.size(), prev);
      prev = r.pairs.size();
      for (const auto& [i, j] : r.pairs) EXPECT_LE(m.cost(i, j), gate);
    }
  }
}
