#include "ddtop/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

namespace ddtop::pricing {

bool dominates(const Label& l1, const Label& l2) {
  if (l1.vertex != l2.vertex || l1.direction != l2.direction) return false;
  if (l1.reduced_cost < l2.reduced_cost - kDominanceTol) return false;
  if (l1.length > l2.length + kDominanceTol) return false;
  if (!l1.critical.is_subset_of(l2.critical)) return false;
  return l1.reduced_cost > l2.reduced_cost + kDominanceTol ||
         l1.length < l2.length - kDominanceTol || !(l1.critical == l2.critical);
}

Pricer::Pricer(const DiscretizedGraph& graph, const master::DualValues& duals, double budget,
               const NodeState& node, PricingParams params)
    : graph_(graph),
      budget_(budget),
      lambda0_(duals.lambda0),
      params_(params),
      n_(graph.num_targets()),
      source_(graph.instance().source()),
      destination_(graph.instance().destination()),
      forbidden_(node.forbidden_targets) {
  const auto n = static_cast<std::size_t>(n_);
  gain_.assign(n, 0.0);
  for (int t = 0; t < n_; ++t) {
    if (graph.instance().is_terminal(t)) continue;
    const auto u = static_cast<std::size_t>(t);
    gain_[u] = graph.score(t) - duals.lambda[u] + duals.mu[u];
  }
  nu_.assign(n * n, 0.0);
  for (const auto& [c, value] : duals.nu)
    nu_[static_cast<std::size_t>(c.from * n_ + c.to)] += value;
  forbidden_conn_.assign(n * n, 0);
  for (const auto& c : node.forbidden_connections)
    forbidden_conn_[static_cast<std::size_t>(c.from * n_ + c.to)] = 1;

  // Targets on zero-length cycles are kept elementary from the start; otherwise
  // labels could circulate without consuming the length resource.
  for (int u = 0; u < n_; ++u) {
    if (!target_usable(u)) continue;
    bool zero_in = false, zero_out = false;
    for (int w = 0; w < n_; ++w) {
      if (w == u || !target_usable(w)) continue;
      zero_in = zero_in || graph.min_target_cost(w, u) <= 0.0;
      zero_out = zero_out || graph.min_target_cost(u, w) <= 0.0;
    }
    if (zero_in && zero_out) critical_.insert(static_cast<std::size_t>(u));
  }
}

bool Pricer::target_usable(int t) const {
  return t != source_ && t != destination_ && !forbidden_.contains(static_cast<std::size_t>(t));
}

std::vector<Label> Pricer::start_labels(Direction direction) const {
  std::vector<Label> out;
  const int t = direction == Direction::Forward ? source_ : destination_;
  for (int h = 0; h < graph_.num_headings(); ++h) {
    Label l;
    l.vertex = graph_.vertex(t, h);
    l.direction = direction;
    out.push_back(l);
  }
  return out;
}

std::optional<Label> Pricer::extend(const Label& label, int label_index, VertexId to) const {
  const int from_target = graph_.target_of(label.vertex);
  const int u = graph_.target_of(to);
  if (u == from_target || !target_usable(u)) return std::nullopt;
  if (u == label.predecessor_target) return std::nullopt;
  const auto uu = static_cast<std::size_t>(u);
  if (label.critical.contains(uu)) return std::nullopt;

  const bool forward = label.direction == Direction::Forward;
  const int a = forward ? from_target : u;
  const int b = forward ? u : from_target;
  if (!connection_allowed(a, b)) return std::nullopt;

  const double edge = forward ? graph_.cost(label.vertex, to) : graph_.cost(to, label.vertex);
  const double length = label.length + edge;
  if (length > budget_ / 2.0 + kLengthTolerance) return std::nullopt;

  Label next;
  next.critical = label.critical;
  if (critical_.contains(uu)) next.critical.insert(uu);
  next.visited = label.visited;
  next.elementary = label.elementary && !label.visited.contains(uu);
  next.visited.insert(uu);
  next.length = length;
  next.reduced_cost = label.reduced_cost + gain(u) + connection_dual(a, b);
  next.vertex = to;
  next.predecessor = label_index;
  next.predecessor_target = from_target;
  next.direction = label.direction;
  return next;
}

bool Pricer::cannot_reach_own_predecessor(const Label& label) const {
  const int pred = label.predecessor_target;
  if (pred < 0 || !target_usable(pred)) return true;
  if (label.critical.contains(static_cast<std::size_t>(pred))) return true;
  const int here = graph_.target_of(label.vertex);
  const bool forward = label.direction == Direction::Forward;
  if (!connection_allowed(forward ? here : pred, forward ? pred : here)) return true;
  double cheapest = std::numeric_limits<double>::infinity();
  for (int h = 0; h < graph_.num_headings(); ++h) {
    const VertexId v = graph_.vertex(pred, h);
    cheapest = std::min(cheapest, forward ? graph_.cost(label.vertex, v) : graph_.cost(v, label.vertex));
  }
  return label.length + cheapest > budget_ + kLengthTolerance;
}

bool Pricer::discard_check(const Label& dominated, const Label& dominator,
                           std::span<const Label* const> all_dominators) const {
  if (dominator.predecessor_target == dominated.predecessor_target) return true;
  if (cannot_reach_own_predecessor(dominator)) return true;
  for (const Label* other : all_dominators) {
    if (other == &dominator) continue;
    if (other->predecessor_target != dominator.predecessor_target) return true;
    if (other->predecessor_target == dominated.predecessor_target) return true;
    if (cannot_reach_own_predecessor(*other)) return true;
  }
  return false;
}

bool Pricer::try_insert(Label label, std::vector<Label>& arena, std::vector<std::vector<int>>& buckets,
                        std::vector<char>& alive) const {
  auto& bucket = buckets[static_cast<std::size_t>(label.vertex)];
  if (params_.use_dominance) {
    std::vector<const Label*> doms;
    for (int idx : bucket)
      if (alive[static_cast<std::size_t>(idx)] && dominates(arena[static_cast<std::size_t>(idx)], label))
        doms.push_back(&arena[static_cast<std::size_t>(idx)]);
    if (!doms.empty() && discard_check(label, *doms.front(), doms)) return false;
  }

  const int id = static_cast<int>(arena.size());
  arena.push_back(std::move(label));
  alive.push_back(1);
  const Label& fresh = arena.back();

  if (params_.use_dominance) {
    bool any_dead = false;
    for (int idx : bucket) {
      const auto u = static_cast<std::size_t>(idx);
      if (!alive[u] || !dominates(fresh, arena[u])) continue;
      std::vector<const Label*> doms{&fresh};
      for (int jdx : bucket) {
        const auto w = static_cast<std::size_t>(jdx);
        if (jdx != idx && alive[w] && dominates(arena[w], arena[u])) doms.push_back(&arena[w]);
      }
      if (discard_check(arena[u], fresh, doms)) {
        alive[u] = 0;
        any_dead = true;
      }
    }
    if (any_dead)
      std::erase_if(bucket, [&](int idx) { return !alive[static_cast<std::size_t>(idx)]; });
  }
  bucket.push_back(id);
  return true;
}

void Pricer::label_phase(Direction direction, std::vector<Label>& arena,
                         std::vector<std::vector<int>>& buckets, std::size_t& created) const {
  arena.clear();
  buckets.assign(static_cast<std::size_t>(graph_.num_vertices()), {});
  std::vector<char> alive;

  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  for (auto& l : start_labels(direction)) {
    if (try_insert(l, arena, buckets, alive)) queue.emplace(0.0, static_cast<int>(arena.size()) - 1);
  }

  const int k = graph_.num_headings();
  while (!queue.empty()) {
    const int idx = queue.top().second;
    queue.pop();
    if (!alive[static_cast<std::size_t>(idx)]) continue;
    const Label current = arena[static_cast<std::size_t>(idx)];
    const int here = graph_.target_of(current.vertex);
    for (int u = 0; u < n_; ++u) {
      if (u == here || u == current.predecessor_target || !target_usable(u)) continue;
      if (current.critical.contains(static_cast<std::size_t>(u))) continue;
      for (int h = 0; h < k; ++h) {
        auto next = extend(current, idx, graph_.vertex(u, h));
        if (!next) continue;
        ++created;
        const double len = next->length;
        if (try_insert(std::move(*next), arena, buckets, alive))
          queue.emplace(len, static_cast<int>(arena.size()) - 1);
      }
    }
  }
  for (auto& bucket : buckets)
    std::erase_if(bucket, [&](int i) { return !alive[static_cast<std::size_t>(i)]; });
}

std::optional<double> Pricer::join_reduced_cost(const Label& fwd, const Label& bwd) const {
  const int tf = graph_.target_of(fwd.vertex);
  const int tb = graph_.target_of(bwd.vertex);
  if (tf == tb || !connection_allowed(tf, tb)) return std::nullopt;
  if (tb == fwd.predecessor_target || tf == bwd.predecessor_target) return std::nullopt;
  if (fwd.critical.intersects(bwd.critical)) return std::nullopt;
  if (fwd.length + graph_.cost(fwd.vertex, bwd.vertex) + bwd.length > budget_ + kLengthTolerance)
    return std::nullopt;
  return fwd.reduced_cost + bwd.reduced_cost + connection_dual(tf, tb) - lambda0_;
}

std::vector<VertexId> Pricer::chain(const Label& label, std::span<const Label> arena) const {
  std::vector<VertexId> out;
  const Label* cur = &label;
  while (true) {
    out.push_back(cur->vertex);
    if (cur->predecessor < 0) break;
    cur = &arena[static_cast<std::size_t>(cur->predecessor)];
  }
  if (label.direction == Direction::Forward) std::reverse(out.begin(), out.end());
  return out;
}

std::optional<Route> Pricer::join(const Label& fwd, const Label& bwd, std::span<const Label> fwd_arena,
                                  std::span<const Label> bwd_arena) const {
  if (!join_reduced_cost(fwd, bwd)) return std::nullopt;
  auto vertices = chain(fwd, fwd_arena);
  auto tail = chain(bwd, bwd_arena);
  vertices.insert(vertices.end(), tail.begin(), tail.end());
  Route r = make_route(graph_, std::move(vertices));
  if (r.length > budget_ + kLengthTolerance) return std::nullopt;
  return r;
}

PricingResult Pricer::run() {
  PricingResult result;
  std::vector<Label> fwd, bwd;
  std::vector<std::vector<int>> fwd_buckets, bwd_buckets;
  const int nv = graph_.num_vertices();
  const std::size_t max_paths =
      params_.max_paths > 0 ? static_cast<std::size_t>(params_.max_paths) : static_cast<std::size_t>(-1);

  while (true) {
    ++result.dssr_iterations;
    label_phase(Direction::Forward, fwd, fwd_buckets, result.labels_created);
    label_phase(Direction::Backward, bwd, bwd_buckets, result.labels_created);

    for (auto& bucket : bwd_buckets)
      std::stable_sort(bucket.begin(), bucket.end(), [&](int a, int b) {
        return bwd[static_cast<std::size_t>(a)].length < bwd[static_cast<std::size_t>(b)].length;
      });
    std::vector<double> bwd_max(static_cast<std::size_t>(nv), -std::numeric_limits<double>::infinity());
    for (int j = 0; j < nv; ++j)
      for (int idx : bwd_buckets[static_cast<std::size_t>(j)])
        bwd_max[static_cast<std::size_t>(j)] =
            std::max(bwd_max[static_cast<std::size_t>(j)], bwd[static_cast<std::size_t>(idx)].reduced_cost);

    std::vector<Route> routes;
    std::unordered_map<std::size_t, std::vector<std::size_t>> seen;
    double best = -std::numeric_limits<double>::infinity();
    int best_f = -1, best_b = -1;
    bool best_elementary = true;
    bool interrupted = false;

    for (int i = 0; i < nv && !interrupted; ++i) {
      const auto& fb = fwd_buckets[static_cast<std::size_t>(i)];
      if (fb.empty()) continue;
      const int ti = graph_.target_of(i);
      for (int j = 0; j < nv && !interrupted; ++j) {
        const auto& bb = bwd_buckets[static_cast<std::size_t>(j)];
        if (bb.empty()) continue;
        const int tj = graph_.target_of(j);
        if (ti == tj || !connection_allowed(ti, tj)) continue;
        const double edge = graph_.cost(i, j);
        const double nu = connection_dual(ti, tj);
        for (int fi : fb) {
          const Label& f = fwd[static_cast<std::size_t>(fi)];
          if (f.length + edge > budget_ + kLengthTolerance) continue;
          const double bound = f.reduced_cost + bwd_max[static_cast<std::size_t>(j)] + nu - lambda0_;
          if (bound <= best && bound <= kPositiveTol) continue;
          for (int bi : bb) {
            const Label& b = bwd[static_cast<std::size_t>(bi)];
            if (f.length + edge + b.length > budget_ + kLengthTolerance) break;
            if (tj == f.predecessor_target || ti == b.predecessor_target) continue;
            if (f.critical.intersects(b.critical)) continue;
            const double rc = f.reduced_cost + b.reduced_cost + nu - lambda0_;
            const bool elementary = f.elementary && b.elementary && !f.visited.intersects(b.visited);
            if (rc > best) {
              best = rc;
              best_f = fi;
              best_b = bi;
              best_elementary = elementary;
            }
            if (rc > kPositiveTol && elementary) {
              auto route = join(f, b, fwd, bwd);
              if (!route) continue;
              auto& slot = seen[route->hash];
              const bool dup = std::any_of(slot.begin(), slot.end(), [&](std::size_t r) {
                return routes[r].vertices == route->vertices;
              });
              if (dup) continue;
              slot.push_back(routes.size());
              routes.push_back(std::move(*route));
              if (routes.size() >= max_paths) {
                interrupted = true;
                break;
              }
            }
          }
          if (interrupted) break;
        }
      }
    }

    result.routes = std::move(routes);
    result.best_path_reduced_cost = best;
    result.best_path_elementary = best_elementary;
    result.critical_targets = critical_;

    if (best <= kPositiveTol || best_elementary || interrupted) return result;
    if (!result.routes.empty() && params_.early_exit) return result;

    // Targets visited more than once on the best path become critical.
    std::vector<int> count(static_cast<std::size_t>(n_), 0);
    for (auto v : chain(fwd[static_cast<std::size_t>(best_f)], fwd)) ++count[static_cast<std::size_t>(graph_.target_of(v))];
    for (auto v : chain(bwd[static_cast<std::size_t>(best_b)], bwd)) ++count[static_cast<std::size_t>(graph_.target_of(v))];
    bool grew = false;
    for (int t = 0; t < n_; ++t) {
      if (count[static_cast<std::size_t>(t)] > 1 && !critical_.contains(static_cast<std::size_t>(t))) {
        critical_.insert(static_cast<std::size_t>(t));
        grew = true;
      }
    }
    if (!grew) return result;
  }
}

PricingResult price(const DiscretizedGraph& graph, const master::DualValues& duals, double budget,
                    const NodeState& node, PricingParams params) {
  Pricer pricer(graph, duals, budget, node, params);
  return pricer.run();
}

}  // namespace ddtop::pricing
