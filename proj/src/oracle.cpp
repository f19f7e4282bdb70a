#include "ddtop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace ddtop::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSlack = 1e-9;

// Best-scoring sequence per subset of the (at most 8) non-terminal targets.
struct SubsetTable {
  std::vector<double> score;           // -inf when no feasible order exists
  std::vector<std::vector<int>> order; // a feasible visit order
};

// Chooses at most m disjoint subsets maximizing total score.
OracleResult combine(const SubsetTable& table, const std::vector<int>& ids, int m) {
  const std::size_t full = table.score.size() - 1;
  std::vector<double> prev(full + 1, 0.0);
  std::vector<std::vector<std::size_t>> prev_pick(full + 1);
  for (int j = 0; j < m; ++j) {
    std::vector<double> cur = prev;
    std::vector<std::vector<std::size_t>> cur_pick = prev_pick;
    for (std::size_t mask = 1; mask <= full; ++mask) {
      for (std::size_t sub = mask; sub != 0; sub = (sub - 1) & mask) {
        if (table.score[sub] == -kInf) continue;
        const double v = table.score[sub] + prev[mask & ~sub];
        if (v > cur[mask]) {
          cur[mask] = v;
          cur_pick[mask] = prev_pick[mask & ~sub];
          cur_pick[mask].push_back(sub);
        }
      }
    }
    prev = std::move(cur);
    prev_pick = std::move(cur_pick);
  }
  OracleResult out;
  out.objective = prev[full];
  for (std::size_t sub : prev_pick[full]) {
    OracleRoute r;
    for (int local : table.order[sub]) r.targets.push_back(ids[static_cast<std::size_t>(local)]);
    out.routes.push_back(std::move(r));
  }
  return out;
}

double subset_score(const std::vector<double>& scores, std::size_t mask) {
  double s = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if ((mask >> i) & 1U) s += scores[i];
  return s;
}

// Depth-first enumeration of elementary orders. `extend` maps a prefix state and
// the next local target to a new state, or nothing when the prefix already
// exceeds the budget. `finish` is called for every prefix (including empty).
template <class State, class Extend, class Finish>
void enumerate_orders(int count, const State& root, Extend extend, Finish finish,
                      std::size_t& enumerated) {
  std::vector<int> order;
  std::vector<char> used(static_cast<std::size_t>(count), 0);
  std::function<void(const State&)> dfs = [&](const State& state) {
    ++enumerated;
    finish(order, state);
    for (int next = 0; next < count; ++next) {
      if (used[static_cast<std::size_t>(next)]) continue;
      auto child = extend(order, state, next);
      if (!child) continue;
      used[static_cast<std::size_t>(next)] = 1;
      order.push_back(next);
      dfs(*child);
      order.pop_back();
      used[static_cast<std::size_t>(next)] = 0;
    }
  };
  dfs(root);
}

std::vector<int> inner_targets(const Instance& inst) {
  std::vector<int> ids;
  for (int t = 1; t < inst.destination(); ++t) ids.push_back(t);
  return ids;
}

// Heading DP: best[h] = shortest length from any source vertex to heading h of
// the last target in the prefix.
struct HeadingState {
  int last = 0;
  std::vector<double> best;
};

std::optional<HeadingState> advance_headings(const DiscretizedGraph& g, const HeadingState& s, int target,
                                             double budget) {
  const int k = g.num_headings();
  HeadingState next{target, std::vector<double>(static_cast<std::size_t>(k), kInf)};
  double lowest = kInf;
  for (int to = 0; to < k; ++to) {
    for (int from = 0; from < k; ++from) {
      const double v = s.best[static_cast<std::size_t>(from)] + g.cost(g.vertex(s.last, from), g.vertex(target, to));
      next.best[static_cast<std::size_t>(to)] = std::min(next.best[static_cast<std::size_t>(to)], v);
    }
    lowest = std::min(lowest, next.best[static_cast<std::size_t>(to)]);
  }
  if (lowest > budget + kSlack) return std::nullopt;
  return next;
}

double close_headings(const DiscretizedGraph& g, const HeadingState& s, int destination) {
  double best = kInf;
  for (int from = 0; from < g.num_headings(); ++from)
    for (int to = 0; to < g.num_headings(); ++to)
      best = std::min(best, s.best[static_cast<std::size_t>(from)] +
                                g.cost(g.vertex(s.last, from), g.vertex(destination, to)));
  return best;
}

// Cheapest vertex sequence for a fixed target order.
std::vector<VertexId> best_vertices(const DiscretizedGraph& g, const std::vector<int>& seq, double& length) {
  const int k = g.num_headings();
  const auto K = static_cast<std::size_t>(k);
  std::vector<std::vector<double>> dist(seq.size(), std::vector<double>(K, kInf));
  std::vector<std::vector<int>> parent(seq.size(), std::vector<int>(K, -1));
  for (std::size_t h = 0; h < K; ++h) dist[0][h] = 0.0;
  for (std::size_t i = 1; i < seq.size(); ++i)
    for (int to = 0; to < k; ++to)
      for (int from = 0; from < k; ++from) {
        const double v = dist[i - 1][static_cast<std::size_t>(from)] +
                         g.cost(g.vertex(seq[i - 1], from), g.vertex(seq[i], to));
        if (v < dist[i][static_cast<std::size_t>(to)]) {
          dist[i][static_cast<std::size_t>(to)] = v;
          parent[i][static_cast<std::size_t>(to)] = from;
        }
      }
  int h = static_cast<int>(std::min_element(dist.back().begin(), dist.back().end()) - dist.back().begin());
  length = dist.back()[static_cast<std::size_t>(h)];
  std::vector<VertexId> out(seq.size());
  for (std::size_t i = seq.size(); i-- > 0;) {
    out[i] = g.vertex(seq[i], h);
    if (i > 0) h = parent[i][static_cast<std::size_t>(h)];
  }
  return out;
}

}  // namespace

OracleResult enumerate_dtop(const DiscretizedGraph& graph, int num_vehicles, double budget) {
  const auto& inst = graph.instance();
  const auto ids = inner_targets(inst);
  if (static_cast<int>(ids.size()) > kMaxTargets || graph.num_headings() > kMaxHeadings)
    throw SizeGuardError("enumerate_dtop: instance exceeds the enumeration size guard");
  const int count = static_cast<int>(ids.size());
  std::vector<double> scores;
  for (int t : ids) scores.push_back(graph.score(t));

  SubsetTable table;
  table.score.assign(std::size_t{1} << count, -kInf);
  table.order.assign(std::size_t{1} << count, {});

  HeadingState root{inst.source(), std::vector<double>(static_cast<std::size_t>(graph.num_headings()), 0.0)};
  std::size_t enumerated = 0;
  enumerate_orders(
      count, root,
      [&](const std::vector<int>&, const HeadingState& s, int next) {
        return advance_headings(graph, s, ids[static_cast<std::size_t>(next)], budget);
      },
      [&](const std::vector<int>& order, const HeadingState& s) {
        if (close_headings(graph, s, inst.destination()) > budget + kSlack) return;
        std::size_t mask = 0;
        for (int i : order) mask |= std::size_t{1} << i;
        if (table.score[mask] == -kInf) {
          table.score[mask] = subset_score(scores, mask);
          table.order[mask] = order;
        }
      },
      enumerated);

  OracleResult out = combine(table, ids, num_vehicles);
  out.enumerated = enumerated;
  for (auto& r : out.routes) {
    r.targets.insert(r.targets.begin(), inst.source());
    r.targets.push_back(inst.destination());
    r.vertices = best_vertices(graph, r.targets, r.length);
    r.score = 0.0;
    for (int t : r.targets)
      if (!inst.is_terminal(t)) r.score += graph.score(t);
  }
  // Routes without targets carry nothing.
  std::erase_if(out.routes, [](const OracleRoute& r) { return r.targets.size() <= 2; });
  return out;
}

OracleResult enumerate_top_euclidean(const Instance& instance, int num_vehicles, double budget) {
  const auto ids = inner_targets(instance);
  if (static_cast<int>(ids.size()) > kMaxTargets)
    throw SizeGuardError("enumerate_top_euclidean: instance exceeds the enumeration size guard");
  const int count = static_cast<int>(ids.size());
  auto pos = [&](int t) { return instance.targets[static_cast<std::size_t>(t)]; };
  auto dist = [&](int a, int b) { return std::hypot(pos(a).x - pos(b).x, pos(a).y - pos(b).y); };
  std::vector<double> scores;
  for (int t : ids) scores.push_back(pos(t).score);

  SubsetTable table;
  table.score.assign(std::size_t{1} << count, -kInf);
  table.order.assign(std::size_t{1} << count, {});

  struct Prefix {
    int last;
    double length;
  };
  std::size_t enumerated = 0;
  enumerate_orders(
      count, Prefix{instance.source(), 0.0},
      [&](const std::vector<int>&, const Prefix& p, int next) -> std::optional<Prefix> {
        const int t = ids[static_cast<std::size_t>(next)];
        const double len = p.length + dist(p.last, t);
        if (len > budget + kSlack) return std::nullopt;
        return Prefix{t, len};
      },
      [&](const std::vector<int>& order, const Prefix& p) {
        if (p.length + dist(p.last, instance.destination()) > budget + kSlack) return;
        std::size_t mask = 0;
        for (int i : order) mask |= std::size_t{1} << i;
        if (table.score[mask] == -kInf) {
          table.score[mask] = subset_score(scores, mask);
          table.order[mask] = order;
        }
      },
      enumerated);

  OracleResult out = combine(table, ids, num_vehicles);
  out.enumerated = enumerated;
  for (auto& r : out.routes) {
    r.targets.insert(r.targets.begin(), instance.source());
    r.targets.push_back(instance.destination());
    for (std::size_t i = 1; i < r.targets.size(); ++i) r.length += dist(r.targets[i - 1], r.targets[i]);
    for (int t : r.targets)
      if (!instance.is_terminal(t)) r.score += pos(t).score;
  }
  std::erase_if(out.routes, [](const OracleRoute& r) { return r.targets.size() <= 2; });
  return out;
}

BestReducedCost best_reduced_cost_route(const DiscretizedGraph& graph, const master::DualValues& duals,
                                        double budget, const NodeState& node) {
  const auto& inst = graph.instance();
  std::vector<int> ids;
  for (int t : inner_targets(inst))
    if (!node.forbidden_targets.contains(static_cast<std::size_t>(t))) ids.push_back(t);
  if (static_cast<int>(ids.size()) > kMaxTargets)
    throw SizeGuardError("best_reduced_cost_route: instance exceeds the enumeration size guard");
  auto forbidden = [&](int a, int b) {
    return std::find(node.forbidden_connections.begin(), node.forbidden_connections.end(),
                     Connection{a, b}) != node.forbidden_connections.end();
  };
  auto nu = [&](int a, int b) {
    double v = 0.0;
    for (const auto& [c, value] : duals.nu)
      if (c.from == a && c.to == b) v += value;
    return v;
  };

  struct Prefix {
    HeadingState headings;
    double value;
  };
  BestReducedCost best;
  std::size_t enumerated = 0;
  HeadingState root{inst.source(), std::vector<double>(static_cast<std::size_t>(graph.num_headings()), 0.0)};
  enumerate_orders(
      static_cast<int>(ids.size()), Prefix{root, -duals.lambda0},
      [&](const std::vector<int>&, const Prefix& p, int next) -> std::optional<Prefix> {
        const int t = ids[static_cast<std::size_t>(next)];
        if (forbidden(p.headings.last, t)) return std::nullopt;
        auto h = advance_headings(graph, p.headings, t, budget);
        if (!h) return std::nullopt;
        const auto u = static_cast<std::size_t>(t);
        const double gain = graph.score(t) - duals.lambda[u] + duals.mu[u] + nu(p.headings.last, t);
        return Prefix{std::move(*h), p.value + gain};
      },
      [&](const std::vector<int>& order, const Prefix& p) {
        if (forbidden(p.headings.last, inst.destination())) return;
        if (close_headings(graph, p.headings, inst.destination()) > budget + kSlack) return;
        if (!best.found || p.value > best.reduced_cost) {
          best.found = true;
          best.reduced_cost = p.value;
          best.targets.clear();
          best.targets.push_back(inst.source());
          for (int i : order) best.targets.push_back(ids[static_cast<std::size_t>(i)]);
          best.targets.push_back(inst.destination());
        }
      },
      enumerated);
  return best;
}

// ---------------------------------------------------------------------------
// Numeric Dubins oracle.

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r > kTwoPi - 1e-9) r = 0.0;
  return r;
}

struct Vec {
  double x, y;
};
Vec operator+(Vec a, Vec b) { return {a.x + b.x, a.y + b.y}; }
Vec operator-(Vec a, Vec b) { return {a.x - b.x, a.y - b.y}; }
Vec operator*(double s, Vec a) { return {s * a.x, s * a.y}; }
double dot(Vec a, Vec b) { return a.x * b.x + a.y * b.y; }
Vec heading_dir(double h) { return {std::cos(h), std::sin(h)}; }
Vec left_normal(double h) { return {-std::sin(h), std::cos(h)}; }

// Steering segment: curvature sign (+1 left, -1 right, 0 straight) and length.
struct Steer {
  double turn;
  double length;
};

geometry::Configuration integrate(const geometry::Configuration& start, const std::array<Steer, 3>& plan,
                                  double rho, double step) {
  double x = start.x, y = start.y, h = start.heading;
  for (const auto& seg : plan) {
    if (seg.length <= 0.0) continue;
    const auto n = static_cast<long>(std::ceil(seg.length / step));
    const double ds = seg.length / static_cast<double>(n);
    const double dh = seg.turn * ds / rho;
    for (long i = 0; i < n; ++i) {
      const double mid = h + dh / 2.0;
      x += ds * std::cos(mid);
      y += ds * std::sin(mid);
      h += dh;
    }
  }
  return {x, y, h};
}

double pose_error(const geometry::Configuration& a, const geometry::Configuration& b) {
  const double dh = std::abs(std::remainder(a.heading - b.heading, kTwoPi));
  return std::hypot(a.x - b.x, a.y - b.y) + dh;
}

// Roots of f on [0, 2π] from sign changes on a uniform grid, refined by bisection.
template <class F>
std::vector<double> grid_roots(F f, int samples) {
  std::vector<double> roots;
  double t_prev = 0.0;
  double f_prev = f(0.0);
  if (std::abs(f_prev) < 1e-12) roots.push_back(0.0);
  for (int i = 1; i <= samples; ++i) {
    const double t = kTwoPi * i / samples;
    const double ft = f(t);
    if (std::abs(ft) < 1e-12) {
      roots.push_back(t);
    } else if (std::abs(f_prev) >= 1e-12 && (f_prev < 0.0) != (ft < 0.0)) {
      double lo = t_prev, hi = t, flo = f_prev;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    t_prev = t;
    f_prev = ft;
  }
  return roots;
}

}  // namespace

double dubins_numeric(const geometry::Configuration& start, const geometry::Configuration& end, double rho,
                      double step) {
  if (step > 1e-3) throw std::invalid_argument("dubins_numeric: step must be at most 1e-3");
  constexpr int kSamples = 3600;
  const Vec p0{start.x, start.y};
  const Vec pe{end.x, end.y};
  const double h0 = start.heading;
  const double he = end.heading;

  struct Candidate {
    double length;
    std::array<Steer, 3> plan;
  };
  std::vector<Candidate> candidates;

  for (double s1 : {1.0, -1.0}) {
    const Vec c1 = p0 + (s1 * rho) * left_normal(h0);
    auto after_first = [&](double t) {
      const double h1 = h0 + s1 * t;
      // Position on the first circle after turning through t.
      const Vec p1 = c1 - (s1 * rho) * left_normal(h1);
      return std::pair{p1, h1};
    };

    // C S C words.
    for (double s3 : {1.0, -1.0}) {
      const Vec c2 = pe + (s3 * rho) * left_normal(he);
      auto f = [&](double t) {
        auto [p1, h1] = after_first(t);
        return dot(left_normal(h1), c2 - p1) - s3 * rho;
      };
      for (double t : grid_roots(f, kSamples)) {
        auto [p1, h1] = after_first(t);
        const Vec q = c2 - (s3 * rho) * left_normal(h1);
        const double straight = dot(heading_dir(h1), q - p1);
        if (straight < -1e-9) continue;
        const double last = wrap(s3 * (he - h1));
        const double first = wrap(t);
        candidates.push_back({rho * (first + last) + std::max(straight, 0.0),
                              {Steer{s1, rho * first}, Steer{0.0, std::max(straight, 0.0)},
                               Steer{s3, rho * last}}});
      }
    }

    // C C C words: the middle circle turns the other way.
    {
      const double s2 = -s1;
      const Vec c3 = pe + (s1 * rho) * left_normal(he);
      auto middle_center = [&](double t) {
        auto [p1, h1] = after_first(t);
        return p1 + (s2 * rho) * left_normal(h1);
      };
      auto f = [&](double t) {
        const Vec cm = middle_center(t);
        return std::hypot(cm.x - c3.x, cm.y - c3.y) - 2.0 * rho;
      };
      for (double t : grid_roots(f, kSamples)) {
        auto [p1, h1] = after_first(t);
        const Vec cm = middle_center(t);
        const Vec contact = 0.5 * (cm + c3);
        // Heading whose left normal is -s2 * (contact - cm) / rho.
        const Vec nrm = (-s2 / rho) * (contact - cm);
        const double h2 = std::atan2(-nrm.x, nrm.y);
        const double first = wrap(t);
        const double middle = wrap(s2 * (h2 - h1));
        const double last = wrap(s1 * (he - h2));
        candidates.push_back({rho * (first + middle + last),
                              {Steer{s1, rho * first}, Steer{s2, rho * middle}, Steer{s1, rho * last}}});
      }
    }
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.length < b.length; });
  for (const auto& c : candidates) {
    if (pose_error(integrate(start, c.plan, rho, step), end) < 1e-3) return c.length;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace ddtop::oracle
