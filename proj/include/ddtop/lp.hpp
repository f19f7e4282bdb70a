#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace ddtop::lp {

/// Feasibility and optimality tolerance shared by the whole solver stack.
inline constexpr double kTolerance = 1e-6;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class RowSense { LessEqual, GreaterEqual };

enum class Status { Optimal, Infeasible, Unbounded };

/// Dense linear program in maximization form:
///   max c·x  s.t.  a_i·x (<= | >=) b_i,  lower <= x <= upper.
/// Lower bounds must be finite.
class LinearProgram {
 public:
  /// Appends a row; existing columns get a zero coefficient in it.
  int add_row(RowSense sense, double rhs);

  /// Appends a column with one coefficient per existing row. Throws
  /// std::invalid_argument on a length mismatch or an empty/inverted bound range.
  int add_column(double objective, std::span<const double> row_coeffs, double lower = 0.0,
                 double upper = kInfinity);

  [[nodiscard]] int num_rows() const { return static_cast<int>(senses_.size()); }
  [[nodiscard]] int num_columns() const { return static_cast<int>(objective_.size()); }

  [[nodiscard]] RowSense sense(int row) const { return senses_[static_cast<std::size_t>(row)]; }
  [[nodiscard]] double rhs(int row) const { return rhs_[static_cast<std::size_t>(row)]; }
  [[nodiscard]] double objective(int col) const { return objective_[static_cast<std::size_t>(col)]; }
  [[nodiscard]] double lower(int col) const { return lower_[static_cast<std::size_t>(col)]; }
  [[nodiscard]] double upper(int col) const { return upper_[static_cast<std::size_t>(col)]; }
  [[nodiscard]] std::span<const double> column(int col) const {
    return columns_[static_cast<std::size_t>(col)];
  }
  [[nodiscard]] double coefficient(int row, int col) const {
    return columns_[static_cast<std::size_t>(col)][static_cast<std::size_t>(row)];
  }

 private:
  std::vector<RowSense> senses_;
  std::vector<double> rhs_;
  std::vector<double> objective_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<std::vector<double>> columns_;
};

/// Simplex basis usable as a warm start. Entries of `basic` are column indices
/// (>= 0) or slack markers `-(row + 1)`. Columns appended after the basis was
/// taken are treated as nonbasic at their lower bound.
struct Basis {
  std::vector<int> basic;
  std::vector<bool> at_upper;

  [[nodiscard]] bool empty() const { return basic.empty(); }
  [[nodiscard]] static constexpr int slack(int row) { return -(row + 1); }
};

/// Sign convention for `duals`: in this maximization form, rows with sense
/// LessEqual have duals >= 0 and rows with sense GreaterEqual have duals <= 0.
/// The reduced cost of column j is objective_j - Σ_i duals_i · a_ij.
struct LpSolution {
  Status status = Status::Infeasible;
  double objective = 0.0;
  std::vector<double> primal;
  std::vector<double> duals;
  Basis basis;
  int iterations = 0;
};

/// Bounded-variable revised simplex with a dense basis inverse. Dantzig pricing,
/// switching to Bland's rule after 5·(rows + columns) consecutive degenerate pivots.
/// A warm start that is singular or primal infeasible falls back to a cold start.
[[nodiscard]] LpSolution solve(const LinearProgram& program, const Basis* warm_start = nullptr);

}  // namespace ddtop::lp
