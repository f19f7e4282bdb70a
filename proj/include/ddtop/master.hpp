#pragma once

#include <unordered_map>
#include <utility>
#include <vector>

#include "ddtop/instance.hpp"
#include "ddtop/lp.hpp"
#include "ddtop/node_state.hpp"
#include "ddtop/route.hpp"

namespace ddtop::master {

/// Penalty on the artificial variable.
inline constexpr double kDefaultBigM = 1e5;

/// Duals of the node master, all sign-adjusted to be nonnegative.
struct DualValues {
  double lambda0 = 0.0;
  /// Per target; zero for terminals and targets without a cover row.
  std::vector<double> lambda;
  /// Per target; nonzero only for enforced targets.
  std::vector<double> mu;
  /// One entry per enforced connection, in row order.
  std::vector<std::pair<Connection, double>> nu;
};

/// Aggregate flows Σ_r a_tr z_r and Σ_r b_cr z_r.
struct Flows {
  int num_targets = 0;
  std::vector<double> target;
  /// Dense num_targets × num_targets matrix indexed [from * n + to].
  std::vector<double> connection;

  [[nodiscard]] double of(int t) const { return target[static_cast<std::size_t>(t)]; }
  [[nodiscard]] double of(const Connection& c) const {
    return connection[static_cast<std::size_t>(c.from * num_targets + c.to)];
  }
};

struct MasterSolution {
  lp::Status status = lp::Status::Infeasible;
  double objective = 0.0;
  std::vector<double> route_values;
  double artificial = 0.0;
  DualValues duals;
  Flows flows;
};

/// p_r − Σ_{t∈r} λ_t − λ0 + Σ_{t∈r∩ET} μ_t + Σ_{c used by r} ν_c.
[[nodiscard]] double reduced_cost(const Route& route, const DualValues& duals);

/// Flows of a set of weighted routes.
[[nodiscard]] Flows target_flows(const std::vector<Route>& routes, const std::vector<double>& values,
                                 int num_targets);

/// Single-target routes s→t→d (cheapest vertex choice) and the direct route s→d,
/// where they fit the budget.
[[nodiscard]] std::vector<Route> initial_pool(const DiscretizedGraph& graph);

/// Restricted master problem of one node:
///   max Σ p_r z_r − M y
///   Σ z_r ≤ m;  Σ a_tr z_r ≤ 1 (t not forbidden);  Σ a_tr z_r + y ≥ 1 (t ∈ ET);
///   Σ b_cr z_r + y ≥ 1 (c ∈ C);  z ≥ 0, y ≥ 0.
/// Route columns carry no explicit upper bound; cover rows imply z_r ≤ 1 for any
/// route visiting a target.
class Master {
 public:
  Master(const DiscretizedGraph& graph, const NodeState& node, int num_vehicles,
         double big_m = kDefaultBigM);

  /// Adds a column unless an identical vertex sequence is already present.
  bool add_route(Route route);

  /// Solves, warm-starting from the previous basis.
  MasterSolution solve();

  [[nodiscard]] const std::vector<Route>& routes() const { return routes_; }
  [[nodiscard]] const lp::LinearProgram& program() const { return program_; }
  [[nodiscard]] int num_rows() const { return program_.num_rows(); }
  [[nodiscard]] int artificial_column() const { return 0; }

 private:
  std::vector<double> column_for(const Route& route) const;

  const DiscretizedGraph* graph_;
  NodeState node_;
  double big_m_;
  lp::LinearProgram program_;
  std::vector<int> cover_row_;     // per target, -1 if none
  std::vector<int> enforced_row_;  // per target, -1 if none
  std::vector<int> connection_row_;
  std::vector<Route> routes_;
  std::unordered_map<std::size_t, std::vector<int>> by_hash_;
  lp::Basis basis_;
};

}  // namespace ddtop::master
