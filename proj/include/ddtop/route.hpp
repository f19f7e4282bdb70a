#pragma once

#include <compare>
#include <cstddef>
#include <vector>

#include "ddtop/instance.hpp"
#include "ddtop/target_set.hpp"

namespace ddtop {

/// Length comparisons against the budget allow this much slack so that the
/// solver and the enumeration oracles agree on knife-edge sums.
inline constexpr double kLengthTolerance = 1e-9;

/// Ordered pair of targets: a route uses it when it traverses an edge from a
/// vertex of `from` to a vertex of `to`.
struct Connection {
  int from = 0;
  int to = 0;
  friend constexpr auto operator<=>(const Connection&, const Connection&) = default;
};

/// A source-to-destination path through the discretized graph; one master column.
struct Route {
  std::vector<VertexId> vertices;
  /// Target visit sequence, including source and destination.
  std::vector<int> targets;
  /// Non-terminal targets on the route.
  TargetSet visited;
  double length = 0.0;
  double score = 0.0;
  std::size_t hash = 0;

  [[nodiscard]] bool uses(const Connection& c) const;
  /// True if no target appears twice.
  [[nodiscard]] bool is_elementary() const;
};

/// Builds a route from a vertex sequence, computing length (summed in route
/// order), score and visited targets.
[[nodiscard]] Route make_route(const DiscretizedGraph& graph, std::vector<VertexId> vertices);

[[nodiscard]] std::size_t hash_vertices(const std::vector<VertexId>& vertices);

}  // namespace ddtop
