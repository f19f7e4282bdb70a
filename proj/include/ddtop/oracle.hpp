#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ddtop/geometry.hpp"
#include "ddtop/instance.hpp"
#include "ddtop/master.hpp"
#include "ddtop/node_state.hpp"

// Brute-force reference solvers. Slow and deliberately simple; they share no
// code with the LP, pricing or search modules.
namespace ddtop::oracle {

/// Largest number of non-terminal targets the enumerators accept.
inline constexpr int kMaxTargets = 8;
/// Largest heading count `enumerate_dtop` accepts.
inline constexpr int kMaxHeadings = 3;

class SizeGuardError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct OracleRoute {
  /// Visit sequence including source and destination.
  std::vector<int> targets;
  /// Vertex sequence; empty for the Euclidean oracle.
  std::vector<VertexId> vertices;
  double length = 0.0;
  double score = 0.0;
};

struct OracleResult {
  double objective = 0.0;
  std::vector<OracleRoute> routes;
  /// Number of target sequences examined.
  std::size_t enumerated = 0;
};

/// Exact D-DTOP optimum: every disjoint assignment of target subsets to at most m
/// vehicles, every visit order, and the best heading choice per order.
[[nodiscard]] OracleResult enumerate_dtop(const DiscretizedGraph& graph, int num_vehicles,
                                          double budget);

/// Exact TOP optimum with straight-line distances and no headings.
[[nodiscard]] OracleResult enumerate_top_euclidean(const Instance& instance, int num_vehicles,
                                                   double budget);

/// Shortest Dubins length found by root-finding each word family over a dense
/// grid of first-arc angles and checking every candidate by forward integration
/// at spacing `step` (endpoint error below 1e-3). Requires step <= 1e-3.
[[nodiscard]] double dubins_numeric(const geometry::Configuration& start,
                                    const geometry::Configuration& end, double rho,
                                    double step = 1e-3);

struct BestReducedCost {
  bool found = false;
  double reduced_cost = 0.0;
  std::vector<int> targets;
};

/// Highest reduced cost over all elementary budget-feasible routes of the node's
/// reduced graph, by exhaustive enumeration.
[[nodiscard]] BestReducedCost best_reduced_cost_route(const DiscretizedGraph& graph,
                                                      const master::DualValues& duals,
                                                      double budget, const NodeState& node);

}  // namespace ddtop::oracle
