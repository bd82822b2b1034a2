#include "rpw/maxflow.hpp"

#include <gtest/gtest.h>

#include <random>

#include "test_helpers.hpp"

using rpw::bottleneck_profile;
using rpw::cost_matrix;
using rpw::DiscreteDistribution;
using rpw::max_flow_disc;

TEST(MaxFlowDisc, CompleteGraphAtDiameter) {
  std::mt19937_64 rng(5);
  auto mu = testutil::random_distribution(rng, 4, 2);
  auto nu = testutil::random_distribution(rng, 3, 2);
  auto cm = cost_matrix(mu, nu, rpw::kInfiniteP).normalized();
  EXPECT_NEAR(max_flow_disc(mu, nu, cm, 1.0), 1.0, 1e-9);
}

TEST(MaxFlowDisc, DisjointSupportsAtZero) {
  auto mu = DiscreteDistribution::from_points({{0.0}}, {1.0});
  auto nu = DiscreteDistribution::from_points({{1.0}}, {1.0});
  auto cm = cost_matrix(mu, nu, rpw::kInfiniteP).normalized();
  EXPECT_NEAR(max_flow_disc(mu, nu, cm, 0.0), 0.0, 1e-12);
}

TEST(MaxFlowDisc, OverlapFixtureSelfEdgesOnly) {
  auto [mu, nu] = testutil::overlap_fixture();
  auto cm = cost_matrix(mu, nu, rpw::kInfiniteP).normalized();
  EXPECT_NEAR(max_flow_disc(mu, nu, cm, 0.5), 0.9, 1e-9);
}

TEST(BottleneckProfile, IdenticalDistributions) {
  std::mt19937_64 rng(7);
  auto mu = testutil::random_distribution(rng, 5, 2);
  auto cm = cost_matrix(mu, mu, rpw::kInfiniteP).normalized();
  auto B = bottleneck_profile(mu, mu, cm);
  for (double eps : {0.0, 0.1, 0.5, 0.9}) EXPECT_NEAR(B.value_at_eps(eps), 0.0, 1e-12);
}

TEST(BottleneckProfile, OverlapFixtureTwoThresholds) {
  auto [mu, nu] = testutil::overlap_fixture();
  auto cm = cost_matrix(mu, nu, rpw::kInfiniteP).normalized();
  auto B = bottleneck_profile(mu, nu, cm);
  // W_{inf,1-eps} = 0 once eps >= 0.1, else 1.
  EXPECT_NEAR(B.value_at_eps(0.2), 0.0, 1e-12);
  EXPECT_NEAR(B.value_at_eps(0.1), 0.0, 1e-12);
  EXPECT_NEAR(B.value_at_eps(0.05), 1.0, 1e-12);
  EXPECT_NEAR(B.value_at_eps(0.0), 1.0, 1e-12);
}

TEST(BottleneckProfile, OutlierFixture) {
  auto [mu, nu] = testutil::outlier_fixture();
  auto cm = cost_matrix(mu, nu, rpw::kInfiniteP).normalized();
  auto B = bottleneck_profile(mu, nu, cm);
  EXPECT_NEAR(B.value_at_eps(0.02), 0.0, 1e-12);
  EXPECT_NEAR(B.value_at_eps(0.005), 1.0, 1e-12);
}

TEST(MaxFlowDisc, MonotoneInThreshold) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    auto [mu, nu] = testutil::random_overlapping_pair(rng, 5, 6, 2, 1);
    auto cm = cost_matrix(mu, nu, rpw::kInfiniteP).normalized();
    double prev = -1.0;
    for (double t : cm.distinct_costs()) {
      const double f = max_flow_disc(mu, nu, cm, t);
      EXPECT_GE(f, prev - 1e-9);
      prev = f;
    }
    EXPECT_NEAR(prev, 1.0, 1e-9);
  }
}

TEST(BottleneckPartialPlan, RoutesRequestedMass) {
  auto [mu, nu] = testutil::overlap_fixture();
  auto cm = cost_matrix(mu, nu, rpw::kInfiniteP).normalized();
  auto plan = rpw::bottleneck_partial_plan(mu, nu, cm, 0.9);
  EXPECT_NEAR(plan.transported_mass, 0.9, 1e-9);
  EXPECT_NEAR(plan.p_cost, 0.0, 1e-12);  // the 0.9 overlap travels distance 0
  EXPECT_TRUE(rpw::feasible(plan, mu, nu));
  auto full = rpw::bottleneck_partial_plan(mu, nu, cm, 1.0);
  EXPECT_NEAR(full.p_cost, 1.0, 1e-12);
}
