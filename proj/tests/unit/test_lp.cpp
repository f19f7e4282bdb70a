#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ddtop/lp.hpp"

namespace {

using namespace ddtop::lp;

// Best objective over all basic feasible solutions, by brute force over every
// choice of basic variables among structurals and slacks.
double vertex_enumeration(const LinearProgram& lp) {
  const int m = lp.num_rows(), n = lp.num_columns();
  const int total = n + m;
  double best = -kInfinity;
  for (unsigned mask = 0; mask < (1U << total); ++mask) {
    if (__builtin_popcount(mask) != m) continue;
    std::vector<int> basic;
    for (int j = 0; j < total; ++j)
      if (mask >> j & 1U) basic.push_back(j);
    // Dense Gaussian elimination on [B | b].
    std::vector<std::vector<double>> a(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(m + 1)));
    for (int i = 0; i < m; ++i) {
      for (int c = 0; c < m; ++c) {
        const int j = basic[static_cast<std::size_t>(c)];
        double v;
        if (j < n) v = lp.coefficient(i, j);
        else v = (j - n == i) ? (lp.sense(i) == RowSense::LessEqual ? 1.0 : -1.0) : 0.0;
        a[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] = v;
      }
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] = lp.rhs(i);
    }
    bool singular = false;
    for (int c = 0; c < m && !singular; ++c) {
      int piv = c;
      for (int r = c + 1; r < m; ++r)
        if (std::abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) >
            std::abs(a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(c)]))
          piv = r;
      if (std::abs(a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(c)]) < 1e-12) {
        singular = true;
        break;
      }
      std::swap(a[static_cast<std::size_t>(c)], a[static_cast<std::size_t>(piv)]);
      for (int r = 0; r < m; ++r) {
        if (r == c) continue;
        const double f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] /
                         a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
        for (int k = c; k <= m; ++k)
          a[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] -= f * a[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
      }
    }
    if (singular) continue;
    double obj = 0.0;
    bool feasible = true;
    for (int c = 0; c < m; ++c) {
      const double x = a[static_cast<std::size_t>(c)][static_cast<std::size_t>(m)] /
                       a[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
      if (x < -1e-9) feasible = false;
      const int j = basic[static_cast<std::size_t>(c)];
      if (j < n) obj += lp.objective(j) * x;
    }
    if (feasible) best = std::max(best, obj);
  }
  return best;
}

TEST(Lp, SingleBindingRow) {
  LinearProgram lp;
  lp.add_row(RowSense::LessEqual, 1.0);
  const double one[] = {1.0};
  lp.add_column(1.0, one, 0.0, 1.0);
  lp.add_column(1.0, one, 0.0, 1.0);
  const auto s = solve(lp);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective, 1.0, 1e-9);
  EXPECT_NEAR(s.duals[0], 1.0, 1e-9);
}

TEST(Lp, EmptyProgram) {
  LinearProgram lp;
  const auto s = solve(lp);
  EXPECT_EQ(s.status, Status::Optimal);
  EXPECT_EQ(s.objective, 0.0);
  EXPECT_TRUE(s.duals.empty());
}

TEST(Lp, AddColumnValidatesLength) {
  LinearProgram lp;
  lp.add_row(RowSense::LessEqual, 1.0);
  const double two[] = {1.0, 2.0};
  EXPECT_THROW(lp.add_column(1.0, two), std::invalid_argument);
  const double one[] = {1.0};
  EXPECT_THROW(lp.add_column(1.0, one, 2.0, 1.0), std::invalid_argument);
  EXPECT_EQ(lp.add_column(1.0, one), 0);
  EXPECT_EQ(lp.num_columns(), 1);
}

TEST(Lp, AddRowExtendsColumnsWithZeros) {
  LinearProgram lp;
  lp.add_row(RowSense::LessEqual, 4.0);
  const double one[] = {1.0};
  lp.add_column(2.0, one);
  lp.add_row(RowSense::LessEqual, 1.0);
  EXPECT_EQ(lp.coefficient(1, 0), 0.0);
}

TEST(Lp, InfeasibleAndUnbounded) {
  LinearProgram inf;
  inf.add_row(RowSense::LessEqual, 1.0);
  inf.add_row(RowSense::GreaterEqual, 2.0);
  const double c[] = {1.0, 1.0};
  inf.add_column(1.0, c);
  EXPECT_EQ(solve(inf).status, Status::Infeasible);

  LinearProgram unb;
  unb.add_row(RowSense::GreaterEqual, 1.0);
  const double one[] = {1.0};
  unb.add_column(1.0, one);
  EXPECT_EQ(solve(unb).status, Status::Unbounded);
}

TEST(Lp, GreaterEqualRowsHaveNonpositiveDuals) {
  // max -x - y  s.t.  x + y >= 2, x <= 3.
  LinearProgram lp;
  lp.add_row(RowSense::GreaterEqual, 2.0);
  lp.add_row(RowSense::LessEqual, 3.0);
  const double x[] = {1.0, 1.0}, y[] = {1.0, 0.0};
  lp.add_column(-1.0, x);
  lp.add_column(-1.0, y);
  const auto s = solve(lp);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective, -2.0, 1e-9);
  EXPECT_NEAR(s.duals[0], -1.0, 1e-9);
  EXPECT_LE(s.duals[0], 0.0);
}

TEST(Lp, MatchesVertexEnumerationOnRandomPrograms) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  std::uniform_int_distribution<int> obj(-2, 6);
  for (int trial = 0; trial < 200; ++trial) {
    LinearProgram lp;
    const int rows = 2 + trial % 2;
    const int cols = 3 + trial % 3;
    for (int i = 0; i < rows; ++i) lp.add_row(RowSense::LessEqual, u(rng) * 3);
    if (trial % 4 == 0) lp.add_row(RowSense::GreaterEqual, 0.5);
    for (int j = 0; j < cols; ++j) {
      std::vector<double> col;
      for (int i = 0; i < lp.num_rows(); ++i) col.push_back(u(rng));
      lp.add_column(obj(rng), col);
    }
    const double expected = vertex_enumeration(lp);
    const auto s = solve(lp);
    if (std::isinf(expected)) {
      EXPECT_EQ(s.status, Status::Infeasible);
      continue;
    }
    ASSERT_EQ(s.status, Status::Optimal) << "trial " << trial;
    EXPECT_NEAR(s.objective, expected, 1e-7) << "trial " << trial;
    // Dual feasibility: reduced costs nonpositive at the optimum.
    for (int j = 0; j < lp.num_columns(); ++j) {
      double rc = lp.objective(j);
      for (int i = 0; i < lp.num_rows(); ++i) rc -= s.duals[static_cast<std::size_t>(i)] * lp.coefficient(i, j);
      if (s.primal[static_cast<std::size_t>(j)] <= 1e-9) EXPECT_LE(rc, 1e-7);
      else EXPECT_NEAR(rc, 0.0, 1e-7);
    }
    // Strong duality with nonnegative columns.
    double dual_obj = 0.0;
    for (int i = 0; i < lp.num_rows(); ++i) dual_obj += s.duals[static_cast<std::size_t>(i)] * lp.rhs(i);
    EXPECT_NEAR(dual_obj, s.objective, 1e-7);
  }
}

TEST(Lp, UpperBoundedColumns) {
  LinearProgram lp;
  lp.add_row(RowSense::LessEqual, 10.0);
  const double one[] = {1.0};
  lp.add_column(3.0, one, 0.0, 2.0);
  lp.add_column(1.0, one, 0.0, 5.0);
  const auto s = solve(lp);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective, 11.0, 1e-9);
  EXPECT_NEAR(s.primal[0], 2.0, 1e-9);
}

TEST(Lp, WarmStartAfterAppendingColumns) {
  LinearProgram lp;
  lp.add_row(RowSense::LessEqual, 2.0);
  lp.add_row(RowSense::LessEqual, 1.0);
  lp.add_row(RowSense::LessEqual, 1.0);
  const double a[] = {1.0, 1.0, 0.0}, b[] = {1.0, 0.0, 1.0};
  lp.add_column(3.0, a);
  const auto first = solve(lp);
  ASSERT_EQ(first.status, Status::Optimal);
  EXPECT_NEAR(first.objective, 3.0, 1e-9);

  // Duplicate column: objective unchanged.
  lp.add_column(3.0, a);
  const auto dup = solve(lp, &first.basis);
  EXPECT_NEAR(dup.objective, 3.0, 1e-9);

  // Column with positive reduced cost: objective increases.
  lp.add_column(2.0, b);
  const auto warm = solve(lp, &dup.basis);
  const auto cold = solve(lp);
  ASSERT_EQ(warm.status, Status::Optimal);
  EXPECT_NEAR(warm.objective, 5.0, 1e-9);
  EXPECT_NEAR(warm.objective, cold.objective, 1e-9);
}

TEST(Lp, DegenerateProgramTerminates) {
  // Many identical constraints produce heavy degeneracy.
  LinearProgram lp;
  for (int i = 0; i < 6; ++i) lp.add_row(RowSense::LessEqual, 0.0);
  lp.add_row(RowSense::LessEqual, 1.0);
  for (int j = 0; j < 8; ++j) {
    std::vector<double> col(7, 0.0);
    for (int i = 0; i < 6; ++i) col[static_cast<std::size_t>(i)] = ((i + j) % 3) - 1.0;
    col[6] = 1.0;
    lp.add_column(1.0 + 0.1 * j, col);
  }
  const auto s = solve(lp);
  EXPECT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective, vertex_enumeration(lp), 1e-7);
}

}  // namespace
