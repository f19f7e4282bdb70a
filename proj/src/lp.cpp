#include "ddtop/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ddtop::lp {

int LinearProgram::add_row(RowSense sense, double rhs) {
  if (!std::isfinite(rhs)) throw std::invalid_argument("row right-hand side must be finite");
  senses_.push_back(sense);
  rhs_.push_back(rhs);
  for (auto& col : columns_) col.push_back(0.0);
  return num_rows() - 1;
}

int LinearProgram::add_column(double objective, std::span<const double> row_coeffs, double lower,
                              double upper) {
  if (row_coeffs.size() != senses_.size())
    throw std::invalid_argument("column has " + std::to_string(row_coeffs.size()) +
                                " coefficients for " + std::to_string(senses_.size()) + " rows");
  if (!std::isfinite(lower) || upper < lower)
    throw std::invalid_argument("column bounds must satisfy finite lower <= upper");
  objective_.push_back(objective);
  lower_.push_back(lower);
  upper_.push_back(upper);
  columns_.emplace_back(row_coeffs.begin(), row_coeffs.end());
  return num_columns() - 1;
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kZeroStep = 1e-12;
constexpr int kRefactorInterval = 64;

enum class VarKind { Structural, Slack, Artificial };

// Working state of one simplex run. Variables are numbered structurals first,
// then one slack per row, then artificials.
class Simplex {
 public:
  explicit Simplex(const LinearProgram& lp) : lp_(lp), m_(lp.num_rows()), n_(lp.num_columns()) {
    const auto total = static_cast<std::size_t>(n_ + m_);
    lower_.assign(total, 0.0);
    upper_.assign(total, kInfinity);
    for (int j = 0; j < n_; ++j) {
      lower_[static_cast<std::size_t>(j)] = lp.lower(j);
      upper_[static_cast<std::size_t>(j)] = lp.upper(j);
    }
    value_.assign(total, 0.0);
    basic_pos_.assign(total, -1);
  }

  // Column of variable v as a dense vector of length m.
  void column(int v, std::vector<double>& out) const {
    out.assign(static_cast<std::size_t>(m_), 0.0);
    if (v < n_) {
      auto c = lp_.column(v);
      std::copy(c.begin(), c.end(), out.begin());
    } else if (v < n_ + m_) {
      const int row = v - n_;
      out[static_cast<std::size_t>(row)] = slack_sign(row);
    } else {
      const auto& a = artificials_[static_cast<std::size_t>(v - n_ - m_)];
      out[static_cast<std::size_t>(a.row)] = a.sign;
    }
  }

  [[nodiscard]] double slack_sign(int row) const {
    return lp_.sense(row) == RowSense::LessEqual ? 1.0 : -1.0;
  }

  [[nodiscard]] int num_vars() const { return n_ + m_ + static_cast<int>(artificials_.size()); }

  VarKind kind(int v) const {
    if (v < n_) return VarKind::Structural;
    if (v < n_ + m_) return VarKind::Slack;
    return VarKind::Artificial;
  }

  // Cold start: structurals at a finite bound, slack or artificial basis per row.
  void cold_start() {
    for (int j = 0; j < n_; ++j) value_[static_cast<std::size_t>(j)] = lower_[static_cast<std::size_t>(j)];
    std::vector<double> resid(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) resid[static_cast<std::size_t>(i)] = lp_.rhs(i);
    for (int j = 0; j < n_; ++j) {
      const double x = value_[static_cast<std::size_t>(j)];
      if (x == 0.0) continue;
      auto c = lp_.column(j);
      for (int i = 0; i < m_; ++i) resid[static_cast<std::size_t>(i)] -= c[static_cast<std::size_t>(i)] * x;
    }
    basis_.assign(static_cast<std::size_t>(m_), -1);
    for (int i = 0; i < m_; ++i) {
      const double r = resid[static_cast<std::size_t>(i)];
      const double s = r / slack_sign(i);
      if (s >= 0.0) {
        set_basic(i, n_ + i);
        value_[static_cast<std::size_t>(n_ + i)] = s;
      } else {
        artificials_.push_back({i, r >= 0.0 ? 1.0 : -1.0});
        lower_.push_back(0.0);
        upper_.push_back(kInfinity);
        value_.push_back(std::abs(r));
        basic_pos_.push_back(-1);
        set_basic(i, num_vars() - 1);
      }
    }
    binv_.assign(static_cast<std::size_t>(m_ * m_), 0.0);
    refactor();
  }

  // Returns false if the basis is unusable.
  bool warm_start(const Basis& basis) {
    if (static_cast<int>(basis.basic.size()) != m_) return false;
    basis_.assign(static_cast<std::size_t>(m_), -1);
    for (int pos = 0; pos < m_; ++pos) {
      const int enc = basis.basic[static_cast<std::size_t>(pos)];
      const int v = enc >= 0 ? enc : n_ + (-enc - 1);
      if (enc >= n_ || v >= n_ + m_ || v < 0) return false;
      if (basic_pos_[static_cast<std::size_t>(v)] >= 0) return false;
      set_basic(pos, v);
    }
    for (int j = 0; j < n_; ++j) {
      if (basic_pos_[static_cast<std::size_t>(j)] >= 0) continue;
      const bool up = static_cast<std::size_t>(j) < basis.at_upper.size() &&
                      basis.at_upper[static_cast<std::size_t>(j)] &&
                      std::isfinite(upper_[static_cast<std::size_t>(j)]);
      value_[static_cast<std::size_t>(j)] = up ? upper_[static_cast<std::size_t>(j)]
                                               : lower_[static_cast<std::size_t>(j)];
    }
    binv_.assign(static_cast<std::size_t>(m_ * m_), 0.0);
    if (!refactor()) return false;
    for (int pos = 0; pos < m_; ++pos) {
      const int v = basis_[static_cast<std::size_t>(pos)];
      const double x = value_[static_cast<std::size_t>(v)];
      if (x < lower_[static_cast<std::size_t>(v)] - kTolerance ||
          x > upper_[static_cast<std::size_t>(v)] + kTolerance)
        return false;
    }
    return true;
  }

  void reset() {
    const auto total = static_cast<std::size_t>(n_ + m_);
    artificials_.clear();
    lower_.resize(total);
    upper_.resize(total);
    value_.assign(total, 0.0);
    basic_pos_.assign(total, -1);
  }

  [[nodiscard]] bool has_artificials() const { return !artificials_.empty(); }

  // Runs simplex iterations maximizing `cost`. Returns false on unboundedness.
  bool optimize(const std::vector<double>& cost) {
    cost_ = cost;
    std::vector<double> col, w;
    int degenerate_run = 0;
    bool bland = false;
    const int bland_after = 5 * (m_ + n_);
    const int max_iterations = 50000 + 200 * (m_ + num_vars());
    for (int iter = 0; iter < max_iterations; ++iter) {
      if (pivots_since_refactor_ >= kRefactorInterval) refactor();
      compute_duals();

      // Entering variable.
      int entering = -1;
      double best = 0.0;
      double entering_dir = 0.0;
      for (int v = 0; v < num_vars(); ++v) {
        if (basic_pos_[static_cast<std::size_t>(v)] >= 0) continue;
        const double lo = lower_[static_cast<std::size_t>(v)];
        const double up = upper_[static_cast<std::size_t>(v)];
        if (up - lo <= 0.0) continue;
        const double d = reduced_cost(v, col);
        const double x = value_[static_cast<std::size_t>(v)];
        double dir = 0.0;
        if (d > kTolerance && x < up) dir = 1.0;
        else if (d < -kTolerance && x > lo) dir = -1.0;
        if (dir == 0.0) continue;
        if (bland) {
          entering = v;
          entering_dir = dir;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          entering = v;
          entering_dir = dir;
        }
      }
      if (entering < 0) return true;
      ++iterations_;

      column(entering, col);
      multiply_binv(col, w);

      // Ratio test. Basic variable at position p moves by -dir * w[p] * theta.
      double theta = upper_[static_cast<std::size_t>(entering)] - lower_[static_cast<std::size_t>(entering)];
      int leave_pos = -1;
      bool leave_to_upper = false;
      double leave_pivot = 0.0;
      for (int p = 0; p < m_; ++p) {
        const double rate = -entering_dir * w[static_cast<std::size_t>(p)];
        if (std::abs(rate) <= kPivotTol) continue;
        const int b = basis_[static_cast<std::size_t>(p)];
        const double x = value_[static_cast<std::size_t>(b)];
        double limit;
        bool to_upper;
        if (rate < 0.0) {
          limit = (x - lower_[static_cast<std::size_t>(b)]) / -rate;
          to_upper = false;
        } else {
          const double up = upper_[static_cast<std::size_t>(b)];
          if (!std::isfinite(up)) continue;
          limit = (up - x) / rate;
          to_upper = true;
        }
        limit = std::max(limit, 0.0);
        bool take = false;
        if (limit < theta - kZeroStep) {
          take = true;
        } else if (leave_pos >= 0 && limit <= theta + kZeroStep) {
          // Tie: Bland picks the lowest variable index, otherwise the largest pivot.
          if (bland) take = b < basis_[static_cast<std::size_t>(leave_pos)];
          else take = std::abs(w[static_cast<std::size_t>(p)]) > std::abs(leave_pivot);
        }
        if (take) {
          theta = std::min(theta, limit);
          leave_pos = p;
          leave_to_upper = to_upper;
          leave_pivot = w[static_cast<std::size_t>(p)];
        }
      }
      if (!std::isfinite(theta)) return false;

      // Move.
      value_[static_cast<std::size_t>(entering)] += entering_dir * theta;
      for (int p = 0; p < m_; ++p) {
        const int b = basis_[static_cast<std::size_t>(p)];
        value_[static_cast<std::size_t>(b)] -= entering_dir * w[static_cast<std::size_t>(p)] * theta;
      }

      if (theta <= kZeroStep) {
        if (++degenerate_run > bland_after) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }

      if (leave_pos < 0) continue;  // bound flip

      const int leaving = basis_[static_cast<std::size_t>(leave_pos)];
      value_[static_cast<std::size_t>(leaving)] =
          leave_to_upper ? upper_[static_cast<std::size_t>(leaving)] : lower_[static_cast<std::size_t>(leaving)];
      pivot(leave_pos, entering, w);
    }
    throw std::runtime_error("simplex iteration limit reached");
  }

  // Moves basic artificials out of the basis where possible and fixes all
  // artificials at zero.
  void retire_artificials() {
    std::vector<double> col, w;
    for (int p = 0; p < m_; ++p) {
      const int b = basis_[static_cast<std::size_t>(p)];
      if (kind(b) != VarKind::Artificial) continue;
      for (int v = 0; v < n_ + m_; ++v) {
        if (basic_pos_[static_cast<std::size_t>(v)] >= 0) continue;
        column(v, col);
        multiply_binv(col, w);
        if (std::abs(w[static_cast<std::size_t>(p)]) > 1e-7) {
          // Degenerate pivot: the artificial sits at zero.
          value_[static_cast<std::size_t>(b)] = 0.0;
          pivot(p, v, w);
          break;
        }
      }
    }
    for (std::size_t a = 0; a < artificials_.size(); ++a) {
      const auto v = static_cast<std::size_t>(n_ + m_) + a;
      upper_[v] = 0.0;
      if (basic_pos_[v] < 0) value_[v] = 0.0;
    }
    refactor();
  }

  [[nodiscard]] double artificial_sum() const {
    double s = 0.0;
    for (std::size_t a = 0; a < artificials_.size(); ++a) s += value_[static_cast<std::size_t>(n_ + m_) + a];
    return s;
  }

  void fill_solution(LpSolution& sol) {
    refactor();
    compute_duals();
    sol.primal.assign(value_.begin(), value_.begin() + n_);
    sol.duals = duals_;
    sol.objective = 0.0;
    for (int j = 0; j < n_; ++j) sol.objective += lp_.objective(j) * sol.primal[static_cast<std::size_t>(j)];
    sol.basis.basic.resize(static_cast<std::size_t>(m_));
    for (int p = 0; p < m_; ++p) {
      const int b = basis_[static_cast<std::size_t>(p)];
      sol.basis.basic[static_cast<std::size_t>(p)] = b < n_ ? b : Basis::slack(b - n_);
    }
    sol.basis.at_upper.assign(static_cast<std::size_t>(n_), false);
    for (int j = 0; j < n_; ++j) {
      const auto u = static_cast<std::size_t>(j);
      sol.basis.at_upper[u] = basic_pos_[u] < 0 && std::isfinite(upper_[u]) && upper_[u] > lower_[u] &&
                              value_[u] == upper_[u];
    }
    sol.iterations = iterations_;
  }

  // A basic artificial that could not be pivoted out blocks a clean warm basis.
  [[nodiscard]] bool artificial_in_basis() const {
    return std::any_of(basis_.begin(), basis_.end(),
                       [&](int b) { return kind(b) == VarKind::Artificial; });
  }

 private:
  struct Artificial {
    int row;
    double sign;
  };

  void set_basic(int pos, int v) {
    basis_[static_cast<std::size_t>(pos)] = v;
    basic_pos_[static_cast<std::size_t>(v)] = pos;
  }

  double& binv(int r, int c) { return binv_[static_cast<std::size_t>(r * m_ + c)]; }
  [[nodiscard]] double binv(int r, int c) const { return binv_[static_cast<std::size_t>(r * m_ + c)]; }

  void multiply_binv(const std::vector<double>& col, std::vector<double>& out) const {
    out.assign(static_cast<std::size_t>(m_), 0.0);
    for (int r = 0; r < m_; ++r) {
      double s = 0.0;
      for (int c = 0; c < m_; ++c) {
        const double a = col[static_cast<std::size_t>(c)];
        if (a != 0.0) s += binv(r, c) * a;
      }
      out[static_cast<std::size_t>(r)] = s;
    }
  }

  double reduced_cost(int v, std::vector<double>& scratch) const {
    double d = cost_[static_cast<std::size_t>(v)];
    if (v < n_) {
      auto c = lp_.column(v);
      for (int i = 0; i < m_; ++i) d -= duals_[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(i)];
    } else {
      column(v, scratch);
      for (int i = 0; i < m_; ++i) d -= duals_[static_cast<std::size_t>(i)] * scratch[static_cast<std::size_t>(i)];
    }
    return d;
  }

  void compute_duals() {
    duals_.assign(static_cast<std::size_t>(m_), 0.0);
    for (int p = 0; p < m_; ++p) {
      const double cb = cost_.empty() ? 0.0 : cost_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(p)])];
      if (cb == 0.0) continue;
      for (int c = 0; c < m_; ++c) duals_[static_cast<std::size_t>(c)] += cb * binv(p, c);
    }
  }

  // Product-form update of the basis inverse after `entering` replaces position `pos`.
  void pivot(int pos, int entering, const std::vector<double>& w) {
    const int leaving = basis_[static_cast<std::size_t>(pos)];
    basic_pos_[static_cast<std::size_t>(leaving)] = -1;
    set_basic(pos, entering);
    const double piv = w[static_cast<std::size_t>(pos)];
    for (int c = 0; c < m_; ++c) binv(pos, c) /= piv;
    for (int r = 0; r < m_; ++r) {
      if (r == pos) continue;
      const double f = w[static_cast<std::size_t>(r)];
      if (f == 0.0) continue;
      for (int c = 0; c < m_; ++c) binv(r, c) -= f * binv(pos, c);
    }
    ++pivots_since_refactor_;
  }

  // Rebuilds the basis inverse by Gauss-Jordan elimination and recomputes the
  // basic values. Returns false if the basis matrix is singular.
  bool refactor() {
    pivots_since_refactor_ = 0;
    if (m_ == 0) return true;
    std::vector<double> a(static_cast<std::size_t>(m_ * m_));
    std::vector<double> col;
    for (int p = 0; p < m_; ++p) {
      column(basis_[static_cast<std::size_t>(p)], col);
      for (int r = 0; r < m_; ++r) a[static_cast<std::size_t>(r * m_ + p)] = col[static_cast<std::size_t>(r)];
    }
    std::vector<double> inv(static_cast<std::size_t>(m_ * m_), 0.0);
    for (int i = 0; i < m_; ++i) inv[static_cast<std::size_t>(i * m_ + i)] = 1.0;
    auto at = [&](std::vector<double>& mat, int r, int c) -> double& {
      return mat[static_cast<std::size_t>(r * m_ + c)];
    };
    for (int c = 0; c < m_; ++c) {
      int piv = c;
      for (int r = c + 1; r < m_; ++r)
        if (std::abs(at(a, r, c)) > std::abs(at(a, piv, c))) piv = r;
      if (std::abs(at(a, piv, c)) < 1e-12) return false;
      if (piv != c) {
        for (int k = 0; k < m_; ++k) {
          std::swap(at(a, c, k), at(a, piv, k));
          std::swap(at(inv, c, k), at(inv, piv, k));
        }
      }
      const double d = at(a, c, c);
      for (int k = 0; k < m_; ++k) {
        at(a, c, k) /= d;
        at(inv, c, k) /= d;
      }
      for (int r = 0; r < m_; ++r) {
        if (r == c) continue;
        const double f = at(a, r, c);
        if (f == 0.0) continue;
        for (int k = 0; k < m_; ++k) {
          at(a, r, k) -= f * at(a, c, k);
          at(inv, r, k) -= f * at(inv, c, k);
        }
      }
    }
    binv_ = std::move(inv);

    // x_B = B^-1 (b - N x_N)
    std::vector<double> resid(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) resid[static_cast<std::size_t>(i)] = lp_.rhs(i);
    for (int v = 0; v < num_vars(); ++v) {
      if (basic_pos_[static_cast<std::size_t>(v)] >= 0) continue;
      const double x = value_[static_cast<std::size_t>(v)];
      if (x == 0.0) continue;
      column(v, col);
      for (int i = 0; i < m_; ++i) resid[static_cast<std::size_t>(i)] -= col[static_cast<std::size_t>(i)] * x;
    }
    std::vector<double> xb;
    multiply_binv(resid, xb);
    for (int p = 0; p < m_; ++p) value_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(p)])] = xb[static_cast<std::size_t>(p)];
    return true;
  }

  const LinearProgram& lp_;
  int m_;
  int n_;
  std::vector<Artificial> artificials_;
  std::vector<double> lower_, upper_, value_, cost_, duals_, binv_;
  std::vector<int> basis_, basic_pos_;
  int pivots_since_refactor_ = 0;
  int iterations_ = 0;
};

}  // namespace

LpSolution solve(const LinearProgram& program, const Basis* warm_start) {
  LpSolution sol;
  Simplex simplex(program);

  const int n = program.num_columns();
  const int m = program.num_rows();
  bool warm = warm_start != nullptr && !warm_start->empty() && simplex.warm_start(*warm_start);
  if (!warm) {
    simplex.reset();
    simplex.cold_start();
    if (simplex.has_artificials()) {
      std::vector<double> phase1(static_cast<std::size_t>(simplex.num_vars()), 0.0);
      for (int v = n + m; v < simplex.num_vars(); ++v) phase1[static_cast<std::size_t>(v)] = -1.0;
      simplex.optimize(phase1);
      if (simplex.artificial_sum() > kTolerance) {
        sol.status = Status::Infeasible;
        simplex.fill_solution(sol);
        return sol;
      }
      simplex.retire_artificials();
    }
  }

  std::vector<double> phase2(static_cast<std::size_t>(simplex.num_vars()), 0.0);
  for (int j = 0; j < n; ++j) phase2[static_cast<std::size_t>(j)] = program.objective(j);
  if (!simplex.optimize(phase2)) {
    sol.status = Status::Unbounded;
    simplex.fill_solution(sol);
    return sol;
  }
  sol.status = Status::Optimal;
  simplex.fill_solution(sol);
  if (simplex.artificial_in_basis()) sol.basis = {};
  return sol;
}

}  // namespace ddtop::lp
