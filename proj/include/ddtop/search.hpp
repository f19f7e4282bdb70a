#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ddtop/instance.hpp"
#include "ddtop/master.hpp"
#include "ddtop/node_state.hpp"
#include "ddtop/pricing.hpp"
#include "ddtop/route.hpp"

namespace ddtop::search {

/// Tolerance for classifying flows and route values as integral.
inline constexpr double kIntegralityTol = 1e-6;
/// Absolute slack for bound-versus-incumbent comparisons.
inline constexpr double kBoundTol = 1e-6;

struct SolveParams {
  int workers = 8;
  double time_limit_seconds = 3600.0;
  double big_m = master::kDefaultBigM;
  int max_paths = pricing::kDefaultMaxPaths;
};

enum class Status { Optimal, TimeLimit };

[[nodiscard]] std::string to_string(Status status);

struct Incumbent {
  double objective = 0.0;
  std::vector<Route> routes;
  /// Node that produced it; -1 for the empty starting solution.
  int node_id = -1;
};

struct SolveStats {
  /// Nodes whose processing finished (nn).
  std::size_t nodes = 0;
  double wall_seconds = 0.0;
  /// Root LP bound (rub).
  double root_bound = 0.0;
  Status status = Status::Optimal;
  int max_concurrent = 0;
  /// Nodes with fractional route values that were integralized from integral flows.
  std::size_t integralized_nodes = 0;
  /// Nodes with integral flows that could not be integralized with objective preserved.
  std::size_t integralization_failures = 0;
  std::size_t pricing_calls = 0;
  std::size_t columns_generated = 0;
};

struct Solution {
  Incumbent incumbent;
  /// Global upper bound; equals the incumbent objective at optimality.
  double bound = 0.0;
  SolveStats stats;
};

/// Child nodes for a fractional master solution, in processing order.
/// Throws std::logic_error if every target and connection flow is integral.
[[nodiscard]] std::vector<NodeState> branch(const DiscretizedGraph& graph, const NodeState& node,
                                            const master::MasterSolution& solution);

/// True if every target flow and every connection flow between non-terminal
/// targets is integral.
[[nodiscard]] bool flows_integral(const DiscretizedGraph& graph, const master::Flows& flows);

/// One route per distinct target sequence among the routes with positive value.
/// Returns nothing if flows are fractional or the result does not preserve the
/// objective, stay target-disjoint, or fit the fleet.
[[nodiscard]] std::optional<Incumbent> integralize(const DiscretizedGraph& graph,
                                                   const std::vector<Route>& routes,
                                                   const master::MasterSolution& solution,
                                                   int num_vehicles);

enum class Outcome { PrunedBound, PrunedInfeasible, PrunedIntegral, Branched, TimedOut };

struct NodeResult {
  int node_id = 0;
  Outcome outcome = Outcome::PrunedBound;
  /// Converged LP bound, or the inherited bound when timed out before convergence.
  double bound = 0.0;
  bool converged = false;
  std::optional<Incumbent> incumbent;
  std::vector<NodeState> children;
  bool integralized_fractional = false;
  bool integralization_failed = false;
  std::size_t pricing_calls = 0;
  std::size_t columns_generated = 0;
};

/// Column generation on one node followed by classification.
[[nodiscard]] NodeResult node_loop(const DiscretizedGraph& graph, NodeState node, double incumbent_value,
                                   const SolveParams& params,
                                   std::chrono::steady_clock::time_point deadline);

/// Branch-and-price over the discretized graph.
[[nodiscard]] Solution solve(const DiscretizedGraph& graph, const SolveParams& params = {});

}  // namespace ddtop::search
