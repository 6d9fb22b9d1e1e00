#include <gtest/gtest.h>

#include <cmath>

#include "isnet/analytic.hpp"
#include "isnet/simulate.hpp"
#include "isnet/stats.hpp"

namespace isnet {
namespace {

SimConfig config(double horizon, std::uint64_t seed = 7, bool joint = true) {
  SimConfig cfg;
  cfg.seed = seed;
  cfg.horizon = horizon;
  cfg.warmup = 0.1 * horizon;
  cfg.record_joint = joint;
  return cfg;
}

TEST(Simulate, EmptySystem) {
  auto spec = two_node_deadline_network();
  spec.arrival_rates = {0.0, 0.0};
  const auto r = simulate(spec, config(100.0));
  ASSERT_EQ(r.joint_weights.size(), 1u);
  EXPECT_EQ(r.joint_weights.begin()->first, (OccupancyVector{0, 0}));
  EXPECT_DOUBLE_EQ(r.joint_weights.begin()->second, 90.0);
  EXPECT_EQ(r.means, (std::vector<double>{0.0, 0.0}));
}

TEST(Simulate, MMInfinityNode) {
  NetworkSpec spec{{NodeSpec{{Exponential{1.0}}, {{0.0}}}}, {1.0}};
  const auto r = simulate(spec, config(1e5, 3));
  EXPECT_NEAR(r.means[0], 1.0, 0.05);
  EXPECT_LT(total_variation(empirical_marginal(r, 0), poisson_table(1.0)), 0.02);
}

TEST(Simulate, AccountingInvariants) {
  const auto spec = two_node_deadline_network();
  const auto r = simulate(spec, config(2000.0));
  EXPECT_EQ(r.effective_duration, 1800.0);
  double joint_total = 0.0;
  for (const auto& [state, w] : r.joint_weights) joint_total += w;
  EXPECT_NEAR(joint_total, r.effective_duration, 1e-9 * r.effective_duration);

  for (std::size_t n = 0; n < 2; ++n) {
    // customer conservation
    EXPECT_EQ(r.counts.arrivals[n], r.counts.departures_from(n) + r.counts.in_service_at_horizon[n]);
    double total = 0.0, first = 0.0;
    for (std::size_t x = 0; x < r.marginal_weights[n].size(); ++x) {
      total += r.marginal_weights[n][x];
      first += static_cast<double>(x) * r.marginal_weights[n][x];
    }
    EXPECT_NEAR(total, r.effective_duration, 1e-9 * r.effective_duration);
    EXPECT_DOUBLE_EQ(r.means[n], first / r.effective_duration);

    // marginal of the joint histogram
    std::vector<double> projected(r.marginal_weights[n].size(), 0.0);
    for (const auto& [state, w] : r.joint_weights) projected[state[n]] += w;
    for (std::size_t x = 0; x < projected.size(); ++x) {
      EXPECT_NEAR(projected[x], r.marginal_weights[n][x], 1e-12 * r.effective_duration);
    }
  }
  EXPECT_EQ(r.counts.external_arrivals[1], 0u);
  EXPECT_EQ(r.counts.ties, 0u);
}

TEST(Simulate, Reproducible) {
  const auto spec = two_node_deadline_network();
  const auto a = simulate(spec, config(1000.0, 11));
  const auto b = simulate(spec, config(1000.0, 11));
  EXPECT_EQ(a.joint_weights, b.joint_weights);
  EXPECT_EQ(a.marginal_weights, b.marginal_weights);
  EXPECT_EQ(a.means, b.means);
  const auto c = simulate(spec, config(1000.0, 12));
  EXPECT_NE(a.means, c.means);
}

TEST(Simulate, RoutingFrequenciesMatchAchievementProbabilities) {
  const auto spec = two_node_deadline_network();
  const auto stats = compute_min_stats(spec);
  const auto r = simulate(spec, config(5000.0, 5, false));
  for (std::size_t n = 0; n < 2; ++n) {
    const double total = static_cast<double>(r.counts.departures_from(n));
    const double freq = static_cast<double>(r.counts.departures[n][0]) / total;
    const double p = stats.p[n][0];
    EXPECT_NEAR(freq, p, 4 * std::sqrt(p * (1 - p) / total));
  }
}

TEST(Simulate, RejectsBadConfig) {
  const auto spec = two_node_deadline_network();
  auto cfg = config(10.0);
  cfg.warmup = 10.0;
  EXPECT_THROW(simulate(spec, cfg), ContractViolation);
  cfg = config(10.0);
  cfg.generator_name = "pcg32";
  EXPECT_THROW(simulate(spec, cfg), ContractViolation);
}

TEST(Replicate, SingleRunIsThePlainRun) {
  const auto spec = two_node_deadline_network();
  const auto cfg = config(500.0, 21);
  const auto sum = replicate(spec, cfg, 1);
  const auto single = simulate(spec, cfg);
  EXPECT_EQ(sum.pooled_means, single.means);
  EXPECT_EQ(sum.standard_errors, (std::vector<double>{0.0, 0.0}));
  EXPECT_THROW(replicate(spec, cfg, 0), ContractViolation);
}

TEST(Replicate, DeterministicAndIndependentStreams) {
  const auto spec = two_node_deadline_network();
  const auto cfg = config(500.0, 21);
  const auto a = replicate(spec, cfg, 3);
  const auto b = replicate(spec, cfg, 3);
  EXPECT_EQ(a.pooled_means, b.pooled_means);
  EXPECT_EQ(a.standard_errors, b.standard_errors);
  EXPECT_NE(a.runs[0].means, a.runs[1].means);
  EXPECT_EQ(a.runs[2].run, 2u);
  EXPECT_GT(a.standard_errors[0], 0.0);
}

TEST(RandomStream, StreamDerivation) {
  EXPECT_NE(stream_seed(1, 0), stream_seed(1, 1));
  EXPECT_NE(stream_seed(1, 0), stream_seed(2, 0));
  RandomStream a(9, 4), b(9, 4);
  for (int i = 0; i < 5; ++i) {
    const double u = a.uniform();
    EXPECT_EQ(u, b.uniform());
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

}  // namespace
}  // namespace isnet
