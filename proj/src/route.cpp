#include "ddtop/route.hpp"

#include <algorithm>
#include <functional>

#include "ddtop/node_state.hpp"

namespace ddtop {

std::size_t hash_vertices(const std::vector<VertexId>& vertices) {
  // FNV-1a over the vertex ids.
  std::size_t h = 1469598103934665603ULL;
  for (auto v : vertices) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL;
    h *= 1099511628211ULL;
  }
  return h;
}

Route make_route(const DiscretizedGraph& graph, std::vector<VertexId> vertices) {
  Route r;
  r.vertices = std::move(vertices);
  r.targets.reserve(r.vertices.size());
  const auto& inst = graph.instance();
  for (std::size_t i = 0; i < r.vertices.size(); ++i) {
    const int t = graph.target_of(r.vertices[i]);
    r.targets.push_back(t);
    if (i > 0) r.length += graph.cost(r.vertices[i - 1], r.vertices[i]);
    if (!inst.is_terminal(t) && !r.visited.contains(static_cast<std::size_t>(t))) {
      r.visited.insert(static_cast<std::size_t>(t));
      r.score += graph.score(t);
    }
  }
  r.hash = hash_vertices(r.vertices);
  return r;
}

bool Route::uses(const Connection& c) const {
  for (std::size_t i = 1; i < targets.size(); ++i)
    if (targets[i - 1] == c.from && targets[i] == c.to) return true;
  return false;
}

bool Route::is_elementary() const {
  auto sorted = targets;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

bool NodeState::is_forbidden(const Connection& c) const {
  return std::find(forbidden_connections.begin(), forbidden_connections.end(), c) !=
         forbidden_connections.end();
}

bool NodeState::is_enforced(const Connection& c) const {
  return std::find(enforced_connections.begin(), enforced_connections.end(), c) !=
         enforced_connections.end();
}

bool NodeState::allows(const Route& route) const {
  if (route.visited.intersects(forbidden_targets)) return false;
  return std::none_of(forbidden_connections.begin(), forbidden_connections.end(),
                      [&](const Connection& c) { return route.uses(c); });
}

bool NodeState::is_consistent() const {
  if (enforced_targets.intersects(forbidden_targets)) return false;
  return std::none_of(enforced_connections.begin(), enforced_connections.end(), [&](const Connection& c) {
    return forbidden_targets.contains(static_cast<std::size_t>(c.from)) ||
           forbidden_targets.contains(static_cast<std::size_t>(c.to)) || is_forbidden(c);
  });
}

}  // namespace ddtop
