#pragma once

#include <limits>
#include <vector>

#include "ddtop/route.hpp"
#include "ddtop/target_set.hpp"

namespace ddtop {

/// Branching restrictions of one branch-and-bound node plus the columns it
/// inherits from its parent.
struct NodeState {
  int id = 0;
  int depth = 0;
  TargetSet forbidden_targets;
  std::vector<Connection> forbidden_connections;
  TargetSet enforced_targets;
  std::vector<Connection> enforced_connections;
  std::vector<Route> column_pool;
  double parent_bound = std::numeric_limits<double>::infinity();

  [[nodiscard]] bool is_forbidden(const Connection& c) const;
  [[nodiscard]] bool is_enforced(const Connection& c) const;

  /// True if the route avoids every forbidden target and connection.
  [[nodiscard]] bool allows(const Route& route) const;

  /// ET ∩ forbidden = ∅ and enforced connections avoid forbidden targets.
  [[nodiscard]] bool is_consistent() const;
};

}  // namespace ddtop
