#include "ddtop/search.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <deque>
#include <limits>
#include <map>
#include <mutex>
#include <queue>
#include <stdexcept>
#include <thread>

namespace ddtop::search {

std::string to_string(Status status) {
  return status == Status::Optimal ? "optimal" : "time_limit";
}

namespace {

bool is_integral(double v) { return std::abs(v - std::round(v)) <= kIntegralityTol; }

bool bound_dominated(double bound, double incumbent) { return bound <= incumbent + kBoundTol; }

double selection_key(const DiscretizedGraph& graph, const master::MasterSolution& sol, int t) {
  return sol.duals.lambda[static_cast<std::size_t>(t)] - graph.score(t);
}

}  // namespace

bool flows_integral(const DiscretizedGraph& graph, const master::Flows& flows) {
  const auto& inst = graph.instance();
  const int n = inst.num_targets();
  for (int t = 0; t < n; ++t) {
    if (inst.is_terminal(t)) continue;
    if (!is_integral(flows.of(t))) return false;
    for (int u = 0; u < n; ++u)
      if (u != t && !inst.is_terminal(u) && !is_integral(flows.of(Connection{t, u}))) return false;
  }
  return true;
}

std::vector<NodeState> branch(const DiscretizedGraph& graph, const NodeState& node,
                              const master::MasterSolution& solution) {
  const auto& inst = graph.instance();
  const int n = inst.num_targets();

  auto child = [&node]() {
    NodeState c;
    c.depth = node.depth + 1;
    c.forbidden_targets = node.forbidden_targets;
    c.forbidden_connections = node.forbidden_connections;
    c.enforced_targets = node.enforced_targets;
    c.enforced_connections = node.enforced_connections;
    return c;
  };

  int best_t = -1;
  double best_key = std::numeric_limits<double>::infinity();
  for (int t = 0; t < n; ++t) {
    if (inst.is_terminal(t) || is_integral(solution.flows.of(t))) continue;
    const double key = selection_key(graph, solution, t);
    if (key < best_key) {
      best_key = key;
      best_t = t;
    }
  }
  if (best_t >= 0) {
    const auto t = static_cast<std::size_t>(best_t);
    NodeState enforce = child();
    enforce.enforced_targets.insert(t);
    NodeState forbid = child();
    forbid.forbidden_targets.insert(t);
    return {enforce, forbid};
  }

  std::optional<Connection> pick;
  best_key = std::numeric_limits<double>::infinity();
  for (int t1 = 0; t1 < n; ++t1) {
    if (inst.is_terminal(t1)) continue;
    const double key = selection_key(graph, solution, t1);
    for (int t2 = 0; t2 < n; ++t2) {
      if (t2 == t1 || inst.is_terminal(t2)) continue;
      if (is_integral(solution.flows.of(Connection{t1, t2}))) continue;
      if (key < best_key) {
        best_key = key;
        pick = Connection{t1, t2};
      }
    }
  }
  if (!pick) throw std::logic_error("branch: no fractional target or connection flow");

  const auto t1 = static_cast<std::size_t>(pick->from);
  const auto t2 = static_cast<std::size_t>(pick->to);
  std::vector<NodeState> children;
  if (node.enforced_targets.contains(t1) || node.enforced_targets.contains(t2)) {
    NodeState enforce = child();
    enforce.enforced_connections.push_back(*pick);
    NodeState forbid = child();
    forbid.forbidden_connections.push_back(*pick);
    children = {enforce, forbid};
  } else {
    NodeState drop = child();
    drop.forbidden_targets.insert(t1);
    NodeState keep_without = child();
    keep_without.enforced_targets.insert(t1);
    keep_without.forbidden_connections.push_back(*pick);
    NodeState keep_with = child();
    keep_with.enforced_targets.insert(t1);
    keep_with.enforced_connections.push_back(*pick);
    children = {drop, keep_without, keep_with};
  }
  std::erase_if(children, [](const NodeState& c) { return !c.is_consistent(); });
  return children;
}

std::optional<Incumbent> integralize(const DiscretizedGraph& graph, const std::vector<Route>& routes,
                                     const master::MasterSolution& solution, int num_vehicles) {
  if (!flows_integral(graph, solution.flows)) return std::nullopt;
  const double budget = graph.instance().length_budget + kLengthTolerance;

  struct Group {
    std::size_t representative;
    double total;
  };
  std::map<std::vector<int>, Group> groups;
  std::vector<std::vector<int>> order;
  for (std::size_t r = 0; r < routes.size(); ++r) {
    const double z = solution.route_values[r];
    if (z <= kIntegralityTol || routes[r].visited.empty()) continue;
    auto [it, inserted] = groups.try_emplace(routes[r].targets, Group{r, 0.0});
    it->second.total += z;
    if (inserted) order.push_back(routes[r].targets);
  }

  Incumbent inc;
  TargetSet covered;
  for (const auto& key : order) {
    const Group& g = groups.at(key);
    if (std::abs(g.total - 1.0) > kIntegralityTol) return std::nullopt;
    const Route& route = routes[g.representative];
    if (route.visited.intersects(covered) || route.length > budget) return std::nullopt;
    covered |= route.visited;
    inc.objective += route.score;
    inc.routes.push_back(route);
  }
  if (static_cast<int>(inc.routes.size()) > num_vehicles) return std::nullopt;
  if (std::abs(inc.objective - solution.objective) > kIntegralityTol * std::max(1.0, std::abs(solution.objective)))
    return std::nullopt;
  return inc;
}

NodeResult node_loop(const DiscretizedGraph& graph, NodeState node, double incumbent_value,
                     const SolveParams& params, std::chrono::steady_clock::time_point deadline) {
  const auto& inst = graph.instance();
  NodeResult result;
  result.node_id = node.id;
  result.bound = node.parent_bound;

  master::Master master(graph, node, inst.num_vehicles, params.big_m);
  pricing::PricingParams pp;
  pp.max_paths = params.max_paths;

  master::MasterSolution sol;
  while (true) {
    sol = master.solve();
    if (sol.status != lp::Status::Optimal) throw std::runtime_error("node_loop: master LP not solved to optimality");
    if (std::chrono::steady_clock::now() >= deadline) {
      result.outcome = Outcome::TimedOut;
      return result;
    }
    auto priced = pricing::price(graph, sol.duals, inst.length_budget, node, pp);
    ++result.pricing_calls;
    std::size_t added = 0;
    for (auto& r : priced.routes)
      if (master.add_route(std::move(r))) ++added;
    result.columns_generated += added;
    if (added == 0) break;
  }

  result.converged = true;
  result.bound = std::min(sol.objective, node.parent_bound);

  if (sol.artificial > kIntegralityTol) {
    result.outcome = Outcome::PrunedInfeasible;
    return result;
  }
  if (bound_dominated(result.bound, incumbent_value)) {
    result.outcome = Outcome::PrunedBound;
    return result;
  }

  const bool values_integral = std::all_of(sol.route_values.begin(), sol.route_values.end(), is_integral);
  if (flows_integral(graph, sol.flows)) {
    auto inc = integralize(graph, master.routes(), sol, inst.num_vehicles);
    if (inc) {
      inc->node_id = node.id;
      result.incumbent = std::move(inc);
      result.integralized_fractional = !values_integral;
      result.outcome = Outcome::PrunedIntegral;
      return result;
    }
    result.integralization_failed = true;
    result.outcome = Outcome::PrunedBound;
    return result;
  }

  result.children = branch(graph, node, sol);
  for (auto& c : result.children) {
    c.parent_bound = result.bound;
    for (const auto& r : master.routes())
      if (c.allows(r)) c.column_pool.push_back(r);
  }
  result.outcome = Outcome::Branched;
  return result;
}

namespace {

// Unbounded multi-producer queue used for coordinator-worker messages.
template <class T>
class Channel {
 public:
  void send(T value) {
    {
      std::lock_guard lock(mutex_);
      items_.push_back(std::move(value));
    }
    ready_.notify_one();
  }

  // Blocks until a value arrives or the channel closes.
  std::optional<T> receive() {
    std::unique_lock lock(mutex_);
    ready_.wait(lock, [&] { return closed_ || !items_.empty(); });
    return pop_locked();
  }

  template <class Clock, class Duration>
  std::optional<T> receive_until(std::chrono::time_point<Clock, Duration> until) {
    std::unique_lock lock(mutex_);
    ready_.wait_until(lock, until, [&] { return closed_ || !items_.empty(); });
    return pop_locked();
  }

  void close() {
    {
      std::lock_guard lock(mutex_);
      closed_ = true;
    }
    ready_.notify_all();
  }

 private:
  std::optional<T> pop_locked() {
    if (items_.empty()) return std::nullopt;
    T v = std::move(items_.front());
    items_.pop_front();
    return v;
  }

  std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<T> items_;
  bool closed_ = false;
};

struct Task {
  NodeState node;
  double incumbent_value;
};

struct Reply {
  NodeResult result;
  std::exception_ptr error;
};

struct OpenNode {
  NodeState node;
  bool operator<(const OpenNode& o) const {
    if (node.parent_bound != o.node.parent_bound) return node.parent_bound < o.node.parent_bound;
    return node.id > o.node.id;
  }
};

}  // namespace

Solution solve(const DiscretizedGraph& graph, const SolveParams& params) {
  if (params.workers < 1) throw std::invalid_argument("solve: workers must be positive");
  const auto& inst = graph.instance();
  const auto start = std::chrono::steady_clock::now();
  const auto deadline =
      start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                  std::chrono::duration<double>(std::max(0.0, params.time_limit_seconds)));

  Solution out;
  double trivial_bound = 0.0;
  for (int t = 0; t < inst.num_targets(); ++t)
    if (!inst.is_terminal(t)) trivial_bound += std::max(0.0, graph.score(t));

  NodeState root;
  root.id = 0;
  root.parent_bound = trivial_bound;
  root.column_pool = master::initial_pool(graph);

  std::priority_queue<OpenNode> open;
  open.push(OpenNode{std::move(root)});
  int next_id = 1;

  Channel<Task> tasks;
  Channel<Reply> replies;
  std::vector<std::thread> pool;
  for (int w = 0; w < params.workers; ++w)
    pool.emplace_back([&] {
      while (auto task = tasks.receive()) {
        Reply reply;
        try {
          reply.result = node_loop(graph, std::move(task->node), task->incumbent_value, params, deadline);
        } catch (...) {
          reply.error = std::current_exception();
        }
        replies.send(std::move(reply));
      }
    });

  std::map<int, double> in_flight;  // node id -> inherited bound
  bool timed_out = false;
  bool root_done = false;
  std::exception_ptr failure;
  std::vector<double> unfinished_bounds;

  while (true) {
    if (!timed_out && std::chrono::steady_clock::now() >= deadline) timed_out = true;
    while (!timed_out && !failure && !open.empty() && static_cast<int>(in_flight.size()) < params.workers) {
      OpenNode top = open.top();
      open.pop();
      if (bound_dominated(top.node.parent_bound, out.incumbent.objective)) continue;
      in_flight.emplace(top.node.id, top.node.parent_bound);
      out.stats.max_concurrent = std::max(out.stats.max_concurrent, static_cast<int>(in_flight.size()));
      tasks.send(Task{std::move(top.node), out.incumbent.objective});
    }
    if (in_flight.empty()) break;

    auto reply = timed_out ? replies.receive() : replies.receive_until(deadline);
    if (!reply) continue;
    if (reply->error) {
      failure = reply->error;
      in_flight.clear();
      continue;
    }
    NodeResult& res = reply->result;
    in_flight.erase(res.node_id);
    out.stats.pricing_calls += res.pricing_calls;
    out.stats.columns_generated += res.columns_generated;
    if (res.node_id == 0) {
      root_done = res.converged;
      out.stats.root_bound = res.bound;
    }
    if (res.outcome == Outcome::TimedOut) {
      timed_out = true;
      unfinished_bounds.push_back(res.bound);
      continue;
    }
    ++out.stats.nodes;
    if (res.integralized_fractional) ++out.stats.integralized_nodes;
    if (res.integralization_failed) ++out.stats.integralization_failures;
    if (res.incumbent && res.incumbent->objective > out.incumbent.objective + kBoundTol)
      out.incumbent = std::move(*res.incumbent);
    for (auto& c : res.children) {
      c.id = next_id++;
      open.push(OpenNode{std::move(c)});
    }
  }

  tasks.close();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  if (timed_out) {
    out.stats.status = Status::TimeLimit;
    double bound = out.incumbent.objective;
    for (double b : unfinished_bounds) bound = std::max(bound, b);
    while (!open.empty()) {
      if (!bound_dominated(open.top().node.parent_bound, out.incumbent.objective))
        bound = std::max(bound, open.top().node.parent_bound);
      open.pop();
    }
    out.bound = bound;
    if (!root_done) out.stats.root_bound = std::max(out.stats.root_bound, trivial_bound);
  } else {
    out.stats.status = Status::Optimal;
    out.bound = out.incumbent.objective;
  }
  out.stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace ddtop::search
