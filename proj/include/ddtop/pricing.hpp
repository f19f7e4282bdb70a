#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "ddtop/instance.hpp"
#include "ddtop/master.hpp"
#include "ddtop/node_state.hpp"
#include "ddtop/route.hpp"
#include "ddtop/target_set.hpp"

namespace ddtop::pricing {

/// Reduced costs above this are treated as strictly positive.
inline constexpr double kPositiveTol = 1e-6;
/// Strictness tolerance for dominance comparisons.
inline constexpr double kDominanceTol = 1e-9;

inline constexpr int kDefaultMaxPaths = 500;

enum class Direction { Forward, Backward };

/// Partial path state (S, ℓ, c, i). Forward labels grow from a source vertex;
/// backward labels grow from a destination vertex against the edge direction
/// but accumulate forward edge costs.
struct Label {
  /// Critical targets on the partial path.
  TargetSet critical;
  /// All non-terminal targets on the partial path.
  TargetSet visited;
  double length = 0.0;
  /// Sum of arrival gains; λ0 is applied once at the join.
  double reduced_cost = 0.0;
  VertexId vertex = 0;
  int predecessor = -1;
  int predecessor_target = -1;
  Direction direction = Direction::Forward;
  bool elementary = true;
};

/// True iff c1 ≥ c2, ℓ1 ≤ ℓ2 and S1 ⊆ S2 with at least one strict.
[[nodiscard]] bool dominates(const Label& l1, const Label& l2);

struct PricingParams {
  int max_paths = kDefaultMaxPaths;
  /// Return elementary positives as soon as the best join is non-elementary.
  /// With false, DSSR runs until the best join is elementary or nonpositive.
  bool early_exit = true;
  bool use_dominance = true;
};

struct PricingResult {
  std::vector<Route> routes;
  double best_path_reduced_cost = -std::numeric_limits<double>::infinity();
  bool best_path_elementary = true;
  int dssr_iterations = 0;
  std::size_t labels_created = 0;
  TargetSet critical_targets;

  /// No elementary route with positive reduced cost exists.
  [[nodiscard]] bool is_certificate() const {
    return routes.empty() && best_path_reduced_cost <= kPositiveTol;
  }
};

/// One pricing call against a node's reduced graph. Exposes the individual
/// label operations for testing.
class Pricer {
 public:
  Pricer(const DiscretizedGraph& graph, const master::DualValues& duals, double budget,
         const NodeState& node, PricingParams params = {});

  /// Start labels: one per source vertex (forward) or destination vertex (backward).
  [[nodiscard]] std::vector<Label> start_labels(Direction direction) const;

  /// Extends `label` (stored at `label_index`) to `to`. Rejects on the half-budget,
  /// critical-set and two-cycle rules, and on forbidden targets or connections.
  [[nodiscard]] std::optional<Label> extend(const Label& label, int label_index, VertexId to) const;

  /// Whether `dominated` may be dropped given its dominator and every label that
  /// dominates it (including `dominator`).
  [[nodiscard]] bool discard_check(const Label& dominated, const Label& dominator,
                                   std::span<const Label* const> all_dominators) const;

  /// Reduced cost of joining `fwd` and `bwd` through the edge between their
  /// vertices, or nothing if the join is infeasible.
  [[nodiscard]] std::optional<double> join_reduced_cost(const Label& fwd, const Label& bwd) const;

  /// Joins two labels into a route, given the label arenas for walking
  /// predecessor chains. Rejects when the total length exceeds the budget.
  [[nodiscard]] std::optional<Route> join(const Label& fwd, const Label& bwd,
                                          std::span<const Label> fwd_arena,
                                          std::span<const Label> bwd_arena) const;

  [[nodiscard]] PricingResult run();

  void set_critical(const TargetSet& critical) { critical_ = critical; }
  [[nodiscard]] const TargetSet& critical() const { return critical_; }

  /// Arrival gain of a target: p_t − λ_t + μ_t.
  [[nodiscard]] double gain(int target) const { return gain_[static_cast<std::size_t>(target)]; }
  /// ν of an enforced connection, 0 otherwise.
  [[nodiscard]] double connection_dual(int from, int to) const {
    return nu_[static_cast<std::size_t>(from * n_ + to)];
  }

 private:
  struct Phase;

  [[nodiscard]] bool connection_allowed(int from, int to) const {
    return !forbidden_conn_[static_cast<std::size_t>(from * n_ + to)];
  }
  [[nodiscard]] bool target_usable(int t) const;
  [[nodiscard]] bool cannot_reach_own_predecessor(const Label& label) const;
  void label_phase(Direction direction, std::vector<Label>& arena,
                   std::vector<std::vector<int>>& buckets, std::size_t& created) const;
  bool try_insert(Label label, std::vector<Label>& arena, std::vector<std::vector<int>>& buckets,
                  std::vector<char>& alive) const;
  [[nodiscard]] std::vector<VertexId> chain(const Label& label, std::span<const Label> arena) const;

  const DiscretizedGraph& graph_;
  double budget_;
  double lambda0_;
  PricingParams params_;
  int n_;
  int source_;
  int destination_;
  TargetSet forbidden_;
  TargetSet critical_;
  std::vector<double> gain_;
  std::vector<double> nu_;
  std::vector<char> forbidden_conn_;
};

/// Bounded bidirectional labeling with decremental state space relaxation.
[[nodiscard]] PricingResult price(const DiscretizedGraph& graph, const master::DualValues& duals,
                                  double budget, const NodeState& node, PricingParams params = {});

}  // namespace ddtop::pricing
