#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/generators.hpp"
#include "ddtop/master.hpp"
#include "ddtop/pricing.hpp"

namespace {

using namespace ddtop;

Instance square_instance(int m = 2, double budget = 30.0) {
  Instance inst;
  inst.num_vehicles = m;
  inst.length_budget = budget;
  inst.headings = uniform_headings(2);
  inst.targets = {{0, 0, 0, 0}, {1, 2, 3, 5}, {2, 5, 4, 7}, {3, 8, 3, 4}, {4, 10, 0, 0}};
  return inst;
}

Route route_through(const DiscretizedGraph& g, std::vector<int> targets) {
  std::vector<VertexId> v;
  for (int t : targets) v.push_back(g.vertex(t, 0));
  return make_route(g, v);
}

TEST(Master, RowLayoutAtRoot) {
  const auto g = build_graph(square_instance());
  NodeState root;
  root.column_pool = {route_through(g, {0, 1, 4}), route_through(g, {0, 2, 4}), route_through(g, {0, 3, 4})};
  master::Master mp(g, root, 2);
  EXPECT_EQ(mp.num_rows(), 1 + 3);
  EXPECT_EQ(static_cast<int>(mp.routes().size()), 3);
  EXPECT_EQ(mp.program().num_columns(), 4);
  EXPECT_EQ(mp.program().objective(mp.artificial_column()), -master::kDefaultBigM);
}

TEST(Master, EnforcedTargetWithEmptyPoolNeedsArtificial) {
  const auto g = build_graph(square_instance());
  NodeState node;
  node.enforced_targets.insert(3);
  master::Master mp(g, node, 2);
  const auto s = mp.solve();
  ASSERT_EQ(s.status, lp::Status::Optimal);
  EXPECT_NEAR(s.artificial, 1.0, 1e-9);
  EXPECT_NEAR(s.objective, -master::kDefaultBigM, 1e-6);
  EXPECT_GE(s.duals.mu[3], 0.0);
}

TEST(Master, ReducedCostArithmetic) {
  const auto g = build_graph(square_instance());
  Route r = route_through(g, {0, 1, 2, 4});
  r.score = 10.0;
  master::DualValues d;
  d.lambda0 = 3.0;
  d.lambda = {0, 2, 1, 0, 0};
  d.mu = {0, 0, 0, 0, 0};
  EXPECT_DOUBLE_EQ(master::reduced_cost(r, d), 4.0);
  d.mu[2] = 0.5;
  d.nu.emplace_back(Connection{1, 2}, 1.5);
  d.nu.emplace_back(Connection{2, 1}, 9.0);
  EXPECT_DOUBLE_EQ(master::reduced_cost(r, d), 6.0);
}

TEST(Master, BasicRoutesHaveZeroReducedCost) {
  const auto g = build_graph(square_instance(1, 40));
  NodeState root;
  root.column_pool = master::initial_pool(g);
  root.column_pool.push_back(route_through(g, {0, 1, 2, 4}));
  root.column_pool.push_back(route_through(g, {0, 2, 3, 4}));
  master::Master mp(g, root, 1);
  const auto s = mp.solve();
  ASSERT_EQ(s.status, lp::Status::Optimal);
  for (std::size_t r = 0; r < mp.routes().size(); ++r) {
    const double rc = master::reduced_cost(mp.routes()[r], s.duals);
    EXPECT_LE(rc, 1e-6);
    if (s.route_values[r] > 1e-9) EXPECT_NEAR(rc, 0.0, 1e-6);
  }
}

TEST(Master, SignAdjustedDualsSatisfyStrongDuality) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = fixtures::random_reachable_instance(rng, 5, 2, 2);
    const auto g = build_graph(inst);
    NodeState node;
    node.column_pool = master::initial_pool(g);
    const int enforced = 1 + trial % 5;
    node.enforced_targets.insert(static_cast<std::size_t>(enforced));
    master::Master mp(g, node, 2);
    const auto s = mp.solve();
    ASSERT_EQ(s.status, lp::Status::Optimal);
    EXPECT_NEAR(lp::solve(mp.program()).objective, s.objective, 1e-6);
    // Dual objective: m·λ0 + Σ λ_t − Σ μ_t.
    double dual_obj = 2.0 * s.duals.lambda0;
    for (int t = 1; t < inst.destination(); ++t) dual_obj += s.duals.lambda[static_cast<std::size_t>(t)];
    dual_obj -= s.duals.mu[static_cast<std::size_t>(enforced)];
    EXPECT_NEAR(dual_obj, s.objective, 1e-6);
    EXPECT_GE(s.duals.lambda0, -1e-9);
    for (double v : s.duals.lambda) EXPECT_GE(v, -1e-9);
    for (double v : s.duals.mu) EXPECT_GE(v, -1e-9);
    for (const auto& r : mp.routes()) EXPECT_LE(master::reduced_cost(r, s.duals), 1e-6);
    // Artificial column: −M + Σ μ_t ≤ 0.
    EXPECT_LE(s.duals.mu[static_cast<std::size_t>(enforced)], master::kDefaultBigM + 1e-6);
  }
}

TEST(Master, DuplicateRoutesAreRejected) {
  const auto g = build_graph(square_instance());
  NodeState node;
  master::Master mp(g, node, 2);
  EXPECT_TRUE(mp.add_route(route_through(g, {0, 1, 4})));
  EXPECT_FALSE(mp.add_route(route_through(g, {0, 1, 4})));
  EXPECT_TRUE(mp.add_route(route_through(g, {0, 2, 4})));
}

TEST(Master, ForbiddenTargetsDropInheritedColumns) {
  const auto g = build_graph(square_instance());
  NodeState node;
  node.forbidden_targets.insert(1);
  node.column_pool = {route_through(g, {0, 1, 4}), route_through(g, {0, 2, 4})};
  master::Master mp(g, node, 2);
  EXPECT_EQ(mp.routes().size(), 1U);
  EXPECT_EQ(mp.num_rows(), 1 + 2);
}

TEST(Master, FlowsRecountFromVertexSequences) {
  const auto g = build_graph(square_instance());
  std::vector<Route> routes = {route_through(g, {0, 1, 2, 4}), route_through(g, {0, 2, 1, 4}),
                               route_through(g, {0, 1, 3, 4})};
  const std::vector<double> z = {0.5, 0.5, 0.25};
  const auto f = master::target_flows(routes, z, 5);
  EXPECT_DOUBLE_EQ(f.of(1), 1.25);
  EXPECT_DOUBLE_EQ(f.of(2), 1.0);
  EXPECT_DOUBLE_EQ(f.of(Connection{1, 2}), 0.5);
  EXPECT_DOUBLE_EQ(f.of(Connection{2, 1}), 0.5);
  EXPECT_DOUBLE_EQ(f.of(Connection{0, 1}), 0.75);
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) {
      double expect = 0.0;
      for (std::size_t r = 0; r < routes.size(); ++r)
        for (std::size_t i = 1; i < routes[r].vertices.size(); ++i)
          if (g.target_of(routes[r].vertices[i - 1]) == a && g.target_of(routes[r].vertices[i]) == b)
            expect += z[r];
      EXPECT_DOUBLE_EQ(f.of(Connection{a, b}), expect);
    }
}

TEST(Master, InitialPoolHoldsFeasibleSingleTargetRoutes) {
  const auto g = build_graph(square_instance(2, 12.0));
  const auto pool = master::initial_pool(g);
  ASSERT_FALSE(pool.empty());
  EXPECT_TRUE(pool.front().visited.empty());
  for (const auto& r : pool) {
    EXPECT_LE(r.length, 12.0 + kLengthTolerance);
    EXPECT_LE(r.visited.size(), 1U);
  }
}

}  // namespace
