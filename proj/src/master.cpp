#include "ddtop/master.hpp"

#include <cassert>
#include <limits>

namespace ddtop::master {

double reduced_cost(const Route& route, const DualValues& duals) {
  double rc = route.score - duals.lambda0;
  for (int t : route.visited.to_vector()) {
    rc -= duals.lambda[static_cast<std::size_t>(t)];
    rc += duals.mu[static_cast<std::size_t>(t)];
  }
  for (const auto& [conn, nu] : duals.nu)
    if (route.uses(conn)) rc += nu;
  return rc;
}

Flows target_flows(const std::vector<Route>& routes, const std::vector<double>& values,
                   int num_targets) {
  Flows f;
  f.num_targets = num_targets;
  const auto n = static_cast<std::size_t>(num_targets);
  f.target.assign(n, 0.0);
  f.connection.assign(n * n, 0.0);
  for (std::size_t r = 0; r < routes.size(); ++r) {
    const double z = values[r];
    if (z == 0.0) continue;
    const auto& seq = routes[r].targets;
    for (int t : routes[r].visited.to_vector()) f.target[static_cast<std::size_t>(t)] += z;
    for (std::size_t i = 1; i < seq.size(); ++i)
      f.connection[static_cast<std::size_t>(seq[i - 1]) * n + static_cast<std::size_t>(seq[i])] += z;
  }
  return f;
}

std::vector<Route> initial_pool(const DiscretizedGraph& graph) {
  const auto& inst = graph.instance();
  const int k = graph.num_headings();
  const int s = inst.source();
  const int d = inst.destination();
  const double budget = inst.length_budget + kLengthTolerance;
  std::vector<Route> pool;

  // Direct route.
  {
    double best = std::numeric_limits<double>::infinity();
    std::vector<VertexId> seq;
    for (int a = 0; a < k; ++a)
      for (int c = 0; c < k; ++c) {
        const double len = graph.cost(graph.vertex(s, a), graph.vertex(d, c));
        if (len < best) {
          best = len;
          seq = {graph.vertex(s, a), graph.vertex(d, c)};
        }
      }
    if (best <= budget) pool.push_back(make_route(graph, seq));
  }

  for (int t = 1; t < d; ++t) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<VertexId> seq;
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        for (int c = 0; c < k; ++c) {
          const VertexId va = graph.vertex(s, a), vb = graph.vertex(t, b), vc = graph.vertex(d, c);
          const double len = graph.cost(va, vb) + graph.cost(vb, vc);
          if (len < best) {
            best = len;
            seq = {va, vb, vc};
          }
        }
    if (best <= budget) pool.push_back(make_route(graph, seq));
  }
  return pool;
}

Master::Master(const DiscretizedGraph& graph, const NodeState& node, int num_vehicles, double big_m)
    : graph_(&graph), node_(node), big_m_(big_m) {
  const auto& inst = graph.instance();
  const int n = inst.num_targets();
  cover_row_.assign(static_cast<std::size_t>(n), -1);
  enforced_row_.assign(static_cast<std::size_t>(n), -1);

  program_.add_row(lp::RowSense::LessEqual, static_cast<double>(num_vehicles));
  for (int t = 0; t < n; ++t) {
    if (inst.is_terminal(t) || node.forbidden_targets.contains(static_cast<std::size_t>(t))) continue;
    cover_row_[static_cast<std::size_t>(t)] = program_.add_row(lp::RowSense::LessEqual, 1.0);
  }
  for (int t : node.enforced_targets.to_vector())
    enforced_row_[static_cast<std::size_t>(t)] = program_.add_row(lp::RowSense::GreaterEqual, 1.0);
  for (std::size_t c = 0; c < node.enforced_connections.size(); ++c)
    connection_row_.push_back(program_.add_row(lp::RowSense::GreaterEqual, 1.0));

  // Artificial column y: −M in the objective, +1 in every enforcement row.
  std::vector<double> y(static_cast<std::size_t>(program_.num_rows()), 0.0);
  for (int r : enforced_row_)
    if (r >= 0) y[static_cast<std::size_t>(r)] = 1.0;
  for (int r : connection_row_) y[static_cast<std::size_t>(r)] = 1.0;
  program_.add_column(-big_m_, y);

  for (const auto& route : node.column_pool)
    if (node.allows(route)) add_route(route);
  node_.column_pool.clear();
}

std::vector<double> Master::column_for(const Route& route) const {
  std::vector<double> col(static_cast<std::size_t>(program_.num_rows()), 0.0);
  col[0] = 1.0;
  for (int t : route.visited.to_vector()) {
    const int cr = cover_row_[static_cast<std::size_t>(t)];
    assert(cr >= 0 && "route visits a forbidden target");
    col[static_cast<std::size_t>(cr)] = 1.0;
    const int er = enforced_row_[static_cast<std::size_t>(t)];
    if (er >= 0) col[static_cast<std::size_t>(er)] = 1.0;
  }
  for (std::size_t c = 0; c < node_.enforced_connections.size(); ++c)
    if (route.uses(node_.enforced_connections[c]))
      col[static_cast<std::size_t>(connection_row_[c])] = 1.0;
  return col;
}

bool Master::add_route(Route route) {
  auto& bucket = by_hash_[route.hash];
  for (int idx : bucket)
    if (routes_[static_cast<std::size_t>(idx)].vertices == route.vertices) return false;
  program_.add_column(route.score, column_for(route));
  bucket.push_back(static_cast<int>(routes_.size()));
  routes_.push_back(std::move(route));
  return true;
}

MasterSolution Master::solve() {
  auto lp_sol = lp::solve(program_, basis_.empty() ? nullptr : &basis_);
  MasterSolution sol;
  sol.status = lp_sol.status;
  if (lp_sol.status != lp::Status::Optimal) return sol;
  basis_ = lp_sol.basis;

  sol.objective = lp_sol.objective;
  sol.artificial = lp_sol.primal[0];
  sol.route_values.assign(lp_sol.primal.begin() + 1, lp_sol.primal.end());

  const auto& inst = graph_->instance();
  const auto n = static_cast<std::size_t>(inst.num_targets());
  auto& duals = sol.duals;
  duals.lambda0 = lp_sol.duals[0];
  duals.lambda.assign(n, 0.0);
  duals.mu.assign(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    if (cover_row_[t] >= 0) duals.lambda[t] = lp_sol.duals[static_cast<std::size_t>(cover_row_[t])];
    // GreaterEqual rows carry nonpositive LP duals; flip to the nonnegative convention.
    if (enforced_row_[t] >= 0) duals.mu[t] = -lp_sol.duals[static_cast<std::size_t>(enforced_row_[t])];
  }
  for (std::size_t c = 0; c < node_.enforced_connections.size(); ++c)
    duals.nu.emplace_back(node_.enforced_connections[c],
                          -lp_sol.duals[static_cast<std::size_t>(connection_row_[c])]);

  sol.flows = target_flows(routes_, sol.route_values, inst.num_targets());
  return sol;
}

}  // namespace ddtop::master
