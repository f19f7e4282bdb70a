#include <gtest/gtest.h>

#include <random>

#include "../support/generators.hpp"
#include "ddtop/master.hpp"
#include "ddtop/oracle.hpp"
#include "ddtop/pricing.hpp"

namespace {

using namespace ddtop;
using pricing::Direction;
using pricing::Label;

Instance row_instance(double budget = 40.0) {
  Instance inst;
  inst.num_vehicles = 1;
  inst.length_budget = budget;
  inst.headings = uniform_headings(2);
  inst.targets = {{0, 0, 0, 0}, {1, 3, 1, 4}, {2, 6, 2, 6}, {3, 9, 1, 3}, {4, 12, 0, 0}};
  return inst;
}

master::DualValues zero_duals(const Instance& inst) {
  master::DualValues d;
  d.lambda.assign(static_cast<std::size_t>(inst.num_targets()), 0.0);
  d.mu = d.lambda;
  return d;
}

Label label_at(VertexId v, double len, double rc, int pred_target, TargetSet critical = {}) {
  Label l;
  l.vertex = v;
  l.length = len;
  l.reduced_cost = rc;
  l.predecessor_target = pred_target;
  l.critical = critical;
  return l;
}

TEST(Dominance, StrictInAllThree) {
  TargetSet s3;
  s3.insert(3);
  EXPECT_TRUE(pricing::dominates(label_at(7, 3.0, 5.0, -1), label_at(7, 4.0, 4.0, -1, s3)));
}

TEST(Dominance, IdenticalLabelsDoNotDominate) {
  const auto l = label_at(7, 3.0, 5.0, 1);
  EXPECT_FALSE(pricing::dominates(l, l));
}

TEST(Dominance, IncomparableLabels) {
  // Longer but more profitable versus shorter but less profitable.
  const auto a = label_at(7, 3.0, 5.0, -1), b = label_at(7, 2.0, 4.0, -1);
  EXPECT_FALSE(pricing::dominates(a, b));
  EXPECT_FALSE(pricing::dominates(b, a));
  // Equal resources with incomparable critical sets.
  TargetSet s1, s2;
  s1.insert(1);
  s2.insert(2);
  EXPECT_FALSE(pricing::dominates(label_at(7, 3.0, 5.0, -1, s1), label_at(7, 3.0, 5.0, -1, s2)));
}

TEST(Dominance, ShorterAndMoreProfitableDominates) {
  // (S, length, reduced cost) = (∅, 2, 6) against (∅, 3, 5).
  const auto a = label_at(7, 3.0, 5.0, -1), b = label_at(7, 2.0, 6.0, -1);
  EXPECT_TRUE(pricing::dominates(b, a));
  EXPECT_FALSE(pricing::dominates(a, b));
}

TEST(Dominance, DifferencesWithinToleranceAreNotStrict) {
  const auto a = label_at(7, 3.0, 5.0, -1), b = label_at(7, 3.0 + 1e-12, 5.0 - 1e-12, -1);
  EXPECT_FALSE(pricing::dominates(a, b));
}

TEST(Dominance, DifferentVerticesNeverDominate) {
  EXPECT_FALSE(pricing::dominates(label_at(6, 1.0, 9.0, -1), label_at(7, 4.0, 4.0, -1)));
}

TEST(Discard, SamePredecessorTarget) {
  const auto g = build_graph(row_instance());
  const auto inst = row_instance();
  pricing::Pricer p(g, zero_duals(inst), inst.length_budget, NodeState{});
  const auto dominator = label_at(g.vertex(2, 0), 3.0, 6.0, 1);
  const auto dominated = label_at(g.vertex(2, 0), 4.0, 5.0, 1);
  const Label* doms[] = {&dominator};
  EXPECT_TRUE(p.discard_check(dominated, dominator, doms));
}

TEST(Discard, KeepWhenDominatorCanRevisitItsPredecessor) {
  const auto g = build_graph(row_instance());
  const auto inst = row_instance();
  pricing::Pricer p(g, zero_duals(inst), inst.length_budget, NodeState{});
  const auto dominator = label_at(g.vertex(2, 0), 3.0, 6.0, 1);
  const auto dominated = label_at(g.vertex(2, 0), 4.0, 5.0, 3);
  const Label* doms[] = {&dominator};
  EXPECT_FALSE(p.discard_check(dominated, dominator, doms));
}

TEST(Discard, DominatorThatCannotReturnToItsPredecessor) {
  const auto g = build_graph(row_instance());
  const auto inst = row_instance();
  pricing::Pricer p(g, zero_duals(inst), inst.length_budget, NodeState{});
  // Predecessor is the source terminal.
  const auto from_source = label_at(g.vertex(2, 0), 3.0, 6.0, 0);
  const auto dominated = label_at(g.vertex(2, 0), 4.0, 5.0, 3);
  const Label* doms[] = {&from_source};
  EXPECT_TRUE(p.discard_check(dominated, from_source, doms));
  // Predecessor is critical on the dominator's own path.
  TargetSet s1;
  s1.insert(1);
  const auto critical = label_at(g.vertex(2, 0), 3.0, 6.0, 1, s1);
  TargetSet s13 = s1;
  s13.insert(3);
  const auto dominated2 = label_at(g.vertex(2, 0), 4.0, 5.0, 3, s13);
  const Label* doms2[] = {&critical};
  EXPECT_TRUE(p.discard_check(dominated2, critical, doms2));
  // Returning to the predecessor would exceed the budget.
  const auto far = label_at(g.vertex(2, 0), 39.5, 6.0, 1);
  const auto dominated3 = label_at(g.vertex(2, 0), 39.6, 5.0, 3);
  const Label* doms3[] = {&far};
  EXPECT_TRUE(p.discard_check(dominated3, far, doms3));
}

TEST(Discard, TwoDominatorsWithDifferentPredecessors) {
  Instance inst = row_instance();
  inst.targets.insert(inst.targets.begin() + 4, Target{4, 6, -2, 5});
  inst.targets.back().id = 5;
  const auto g = build_graph(inst);
  pricing::Pricer p(g, zero_duals(inst), inst.length_budget, NodeState{});
  const VertexId v = g.vertex(2, 0);
  const auto d1 = label_at(v, 3.0, 6.0, 1);
  const auto d2 = label_at(v, 3.5, 5.5, 4);
  const auto dominated = label_at(v, 4.0, 5.0, 3);
  const Label* one[] = {&d1};
  EXPECT_FALSE(p.discard_check(dominated, d1, one));
  const Label* two[] = {&d1, &d2};
  EXPECT_TRUE(p.discard_check(dominated, d1, two));
}

TEST(Extend, RejectsCriticalRevisitAndTwoCycle) {
  const auto inst = row_instance(200.0);
  const auto g = build_graph(inst);
  pricing::Pricer p(g, zero_duals(inst), inst.length_budget, NodeState{});
  TargetSet crit;
  crit.insert(1);
  p.set_critical(crit);
  auto start = p.start_labels(Direction::Forward).front();
  auto at1 = p.extend(start, 0, g.vertex(1, 0));
  ASSERT_TRUE(at1.has_value());
  EXPECT_TRUE(at1->critical.contains(1));
  auto at2 = p.extend(*at1, 1, g.vertex(2, 0));
  ASSERT_TRUE(at2.has_value());
  auto at3 = p.extend(*at2, 2, g.vertex(3, 0));
  ASSERT_TRUE(at3.has_value());
  // Target 1 is critical and already on the path.
  EXPECT_FALSE(p.extend(*at3, 3, g.vertex(1, 1)).has_value());
  // Immediate return to the predecessor target.
  EXPECT_FALSE(p.extend(*at3, 3, g.vertex(2, 1)).has_value());
  // Same target as the label's own vertex.
  EXPECT_FALSE(p.extend(*at2, 2, g.vertex(2, 1)).has_value());
}

TEST(Extend, NonCriticalRevisitIsAllowedButMarked) {
  const auto inst = row_instance(200.0);
  const auto g = build_graph(inst);
  pricing::Pricer p(g, zero_duals(inst), inst.length_budget, NodeState{});
  auto l = p.start_labels(Direction::Forward).front();
  std::vector<Label> arena{l};
  for (int t : {1, 2, 3, 1}) {
    auto next = p.extend(arena.back(), static_cast<int>(arena.size()) - 1, g.vertex(t, 0));
    ASSERT_TRUE(next.has_value()) << "to target " << t;
    arena.push_back(*next);
  }
  EXPECT_FALSE(arena.back().elementary);
  EXPECT_TRUE(arena[3].elementary);
}

TEST(Extend, RejectsBeyondHalfBudget) {
  const auto inst = row_instance(10.0);
  const auto g = build_graph(inst);
  pricing::Pricer p(g, zero_duals(inst), inst.length_budget, NodeState{});
  auto start = p.start_labels(Direction::Forward).front();
  EXPECT_TRUE(p.extend(start, 0, g.vertex(1, 0)).has_value());
  EXPECT_FALSE(p.extend(start, 0, g.vertex(3, 0)).has_value());
}

TEST(Extend, GainsMatchWholeRouteReducedCost) {
  const auto inst = row_instance();
  const auto g = build_graph(inst);
  auto d = zero_duals(inst);
  d.lambda = {0, 1.5, 2.25, 0.5, 0};
  d.lambda0 = 1.0;
  NodeState node;
  node.enforced_targets.insert(2);
  d.mu[2] = 0.75;
  node.enforced_connections.push_back({2, 3});
  d.nu.emplace_back(Connection{2, 3}, 0.4);
  pricing::Pricer p(g, d, inst.length_budget, node);
  auto l = p.start_labels(Direction::Forward).front();
  std::vector<Label> arena{l};
  for (int t : {1, 2, 3}) {
    auto next = p.extend(arena.back(), static_cast<int>(arena.size()) - 1, g.vertex(t, 0));
    ASSERT_TRUE(next.has_value());
    arena.push_back(*next);
  }
  const Route r = make_route(g, {g.vertex(0, 0), g.vertex(1, 0), g.vertex(2, 0), g.vertex(3, 0), g.vertex(4, 0)});
  EXPECT_NEAR(arena.back().reduced_cost, master::reduced_cost(r, d) + d.lambda0, 1e-12);
}

TEST(Join, DirectRouteFromEmptyLabels) {
  const auto inst = row_instance();
  const auto g = build_graph(inst);
  pricing::Pricer p(g, zero_duals(inst), inst.length_budget, NodeState{});
  auto f = p.start_labels(Direction::Forward);
  auto b = p.start_labels(Direction::Backward);
  auto route = p.join(f[0], b[0], f, b);
  ASSERT_TRUE(route.has_value());
  EXPECT_EQ(route->targets, (std::vector<int>{0, 4}));
  EXPECT_NEAR(route->length, 12.0, 1e-12);
}

TEST(Join, RejectsOverBudget) {
  const auto inst = row_instance(11.0);
  const auto g = build_graph(inst);
  pricing::Pricer p(g, zero_duals(inst), inst.length_budget, NodeState{});
  auto f = p.start_labels(Direction::Forward);
  auto b = p.start_labels(Direction::Backward);
  EXPECT_FALSE(p.join_reduced_cost(f[0], b[0]).has_value());
}

TEST(Price, SingleScoredTarget) {
  Instance inst = row_instance();
  for (auto& t : inst.targets) t.score = 0;
  inst.targets[2].score = 5;
  const auto g = build_graph(inst);
  const auto res = pricing::price(g, zero_duals(inst), inst.length_budget, NodeState{});
  ASSERT_FALSE(res.routes.empty());
  double best = 0.0;
  for (const auto& r : res.routes) {
    EXPECT_TRUE(r.visited.contains(2));
    best = std::max(best, master::reduced_cost(r, zero_duals(inst)));
  }
  EXPECT_NEAR(best, 5.0, 1e-9);
  pricing::PricingParams full;
  full.early_exit = false;
  EXPECT_NEAR(pricing::price(g, zero_duals(inst), inst.length_budget, NodeState{}, full).best_path_reduced_cost,
              5.0, 1e-9);
}

TEST(Price, LargeLambdaZeroGivesCertificate) {
  const auto inst = row_instance();
  const auto g = build_graph(inst);
  auto d = zero_duals(inst);
  d.lambda0 = 100.0;
  const auto res = pricing::price(g, d, inst.length_budget, NodeState{});
  EXPECT_TRUE(res.is_certificate());
}

TEST(Price, ReturnedRoutesAreElementaryPositiveAndTwoCycleFree) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = fixtures::random_reachable_instance(rng, 6, 1, 2);
    const auto g = build_graph(inst);
    const auto d = fixtures::random_duals(rng, inst, 5.0, 2.0);
    const auto res = pricing::price(g, d, inst.length_budget, NodeState{});
    for (const auto& r : res.routes) {
      EXPECT_TRUE(r.is_elementary());
      EXPECT_GT(master::reduced_cost(r, d), pricing::kPositiveTol);
      EXPECT_LE(r.length, inst.length_budget + kLengthTolerance);
      for (std::size_t i = 2; i < r.targets.size(); ++i) EXPECT_NE(r.targets[i], r.targets[i - 2]);
    }
  }
}

TEST(Price, FullConvergenceMatchesEnumeration) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = fixtures::random_reachable_instance(rng, 6, 1, 1 + trial % 3);
    const auto g = build_graph(inst);
    const auto d = fixtures::random_duals(rng, inst, 8.0, 5.0);
    pricing::PricingParams pp;
    pp.early_exit = false;
    pp.max_paths = 0;
    const auto res = pricing::price(g, d, inst.length_budget, NodeState{}, pp);
    const auto ref = oracle::best_reduced_cost_route(g, d, inst.length_budget, NodeState{});
    ASSERT_TRUE(ref.found);
    EXPECT_TRUE(res.best_path_elementary);
    EXPECT_NEAR(res.best_path_reduced_cost, ref.reduced_cost, 1e-6) << "trial " << trial;
  }
}

TEST(Price, DominanceDoesNotChangeTheOptimum) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = fixtures::random_reachable_instance(rng, 5, 1, 2);
    const auto g = build_graph(inst);
    const auto d = fixtures::random_duals(rng, inst, 6.0, 3.0);
    pricing::PricingParams with, without;
    with.early_exit = without.early_exit = false;
    with.max_paths = without.max_paths = 0;
    without.use_dominance = false;
    const auto a = pricing::price(g, d, inst.length_budget, NodeState{}, with);
    const auto b = pricing::price(g, d, inst.length_budget, NodeState{}, without);
    EXPECT_NEAR(a.best_path_reduced_cost, b.best_path_reduced_cost, 1e-9);
    EXPECT_LE(a.labels_created, b.labels_created);
  }
}

TEST(Price, MaxPathsCapsOutput) {
  std::mt19937_64 rng(15);
  const auto inst = fixtures::random_reachable_instance(rng, 6, 1, 2);
  const auto g = build_graph(inst);
  const auto d = zero_duals(inst);
  pricing::PricingParams pp;
  pp.max_paths = 2;
  EXPECT_LE(pricing::price(g, d, inst.length_budget, NodeState{}, pp).routes.size(), 2U);
}

TEST(Price, DssrCriticalSetGrowsAndTerminates) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = fixtures::random_reachable_instance(rng, 6, 1, 2);
    const auto g = build_graph(inst);
    const auto d = fixtures::random_duals(rng, inst, 2.0, 1.0);
    pricing::PricingParams pp;
    pp.early_exit = false;
    const auto res = pricing::price(g, d, inst.length_budget, NodeState{}, pp);
    EXPECT_GE(res.dssr_iterations, 1);
    EXPECT_LE(res.dssr_iterations, inst.num_targets() + 1);
    EXPECT_LE(static_cast<int>(res.critical_targets.size()), inst.num_targets() - 2);
  }
}

TEST(Price, RespectsForbiddenTargetsAndConnections) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = fixtures::random_reachable_instance(rng, 6, 1, 2);
    const auto g = build_graph(inst);
    const auto d = fixtures::random_duals(rng, inst, 1.0, 0.0);
    NodeState node;
    node.forbidden_targets.insert(2);
    node.forbidden_connections.push_back({1, 3});
    node.forbidden_connections.push_back({0, 4});
    const auto res = pricing::price(g, d, inst.length_budget, node);
    for (const auto& r : res.routes) EXPECT_TRUE(node.allows(r));
    pricing::PricingParams pp;
    pp.early_exit = false;
    pp.max_paths = 0;
    const auto full = pricing::price(g, d, inst.length_budget, node, pp);
    const auto ref = oracle::best_reduced_cost_route(g, d, inst.length_budget, node);
    if (ref.found) EXPECT_NEAR(full.best_path_reduced_cost, ref.reduced_cost, 1e-6);
  }
}

}  // namespace
