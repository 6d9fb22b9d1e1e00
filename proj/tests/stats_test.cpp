#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "isnet/stats.hpp"

namespace isnet {
namespace {

SimResult synthetic(std::map<OccupancyVector, double> joint, double duration) {
  SimResult r;
  r.effective_duration = duration;
  r.config.record_joint = true;
  const std::size_t n = joint.begin()->first.size();
  r.marginal_weights.assign(n, {});
  for (const auto& [state, w] : joint) {
    for (std::size_t i = 0; i < n; ++i) {
      if (r.marginal_weights[i].size() <= state[i]) r.marginal_weights[i].resize(state[i] + 1, 0.0);
      r.marginal_weights[i][state[i]] += w;
    }
  }
  r.joint_weights = std::move(joint);
  return r;
}

TEST(EmpiricalMarginal, Normalisation) {
  SimResult r;
  r.effective_duration = 100.0;
  r.marginal_weights = {{75.0, 25.0}};
  EXPECT_EQ(empirical_marginal(r, 0), (Pmf{0.75, 0.25}));
  r.effective_duration = 0.0;
  EXPECT_THROW(empirical_marginal(r, 0), ContractViolation);
}

TEST(TotalVariation, Basics) {
  const Pmf p{0.2, 0.5, 0.3};
  EXPECT_EQ(total_variation(p, p), 0.0);
  EXPECT_EQ(total_variation(Pmf{1.0}, Pmf{0.0, 1.0}), 1.0);
}

TEST(TotalVariation, PoissonNeighbours) {
  // Oracle: direct summation of 1/2 |pmf_1(x) - pmf_1.1(x)| for x = 0..44.
  double oracle = 0.0;
  for (int x = 0; x <= 44; ++x) {
    const double a = std::exp(-1.0) / std::tgamma(x + 1.0);
    const double b = std::exp(-1.1) * std::pow(1.1, x) / std::tgamma(x + 1.0);
    oracle += 0.5 * std::abs(a - b);
  }
  EXPECT_NEAR(oracle, 0.0367296, 1e-7);
  EXPECT_NEAR(total_variation(poisson_table(1.0), poisson_table(1.1)), oracle, 1e-12);
}

TEST(TotalVariationProperty, SymmetricAndTriangle) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_pmf = [&] {
    Pmf p(1 + gen() % 6);
    double s = 0.0;
    for (double& x : p) s += (x = u(gen));
    for (double& x : p) x /= s;
    return p;
  };
  for (int i = 0; i < 500; ++i) {
    const auto a = random_pmf(), b = random_pmf(), c = random_pmf();
    EXPECT_EQ(total_variation(a, b), total_variation(b, a));
    EXPECT_LE(total_variation(a, c), total_variation(a, b) + total_variation(b, c) + 1e-15);
    EXPECT_GE(total_variation(a, b), 0.0);
    EXPECT_LE(total_variation(a, b), 1.0);
  }
}

TEST(ProductFormDeviation, ExactProductIsZero) {
  std::map<OccupancyVector, double> joint;
  const double p1[] = {0.5, 0.5}, p2[] = {0.25, 0.75};
  for (std::uint32_t a = 0; a < 2; ++a) {
    for (std::uint32_t b = 0; b < 2; ++b) joint[{a, b}] = 64.0 * p1[a] * p2[b];
  }
  EXPECT_EQ(product_form_deviation(synthetic(joint, 64.0)), 0.0);
}

TEST(ProductFormDeviation, PerfectCorrelation) {
  // joint {00: 1/2, 11: 1/2}; product puts 1/4 everywhere
  const auto r = synthetic({{{0, 0}, 1.0}, {{1, 1}, 1.0}}, 2.0);
  EXPECT_DOUBLE_EQ(product_form_deviation(r), 0.25);
}

TEST(ProductFormDeviation, InvariantUnderRelabelling) {
  const auto r = synthetic({{{0, 0}, 3.0}, {{1, 0}, 1.0}, {{2, 1}, 2.0}, {{0, 2}, 4.0}}, 10.0);
  std::map<OccupancyVector, double> swapped;
  for (const auto& [s, w] : r.joint_weights) swapped[{s[1], s[0]}] = w;
  EXPECT_DOUBLE_EQ(product_form_deviation(r), product_form_deviation(synthetic(swapped, 10.0)));
}

TEST(ProductFormDeviation, RequiresJoint) {
  SimResult r;
  r.config.record_joint = false;
  EXPECT_THROW(product_form_deviation(r), ContractViolation);
}

// Two independent M/M/inf queues simulated as one network: the joint is a
// product by construction.
TEST(ProductFormDeviation, IndependentNodes) {
  NetworkSpec spec{{NodeSpec{{Exponential{1.0}}, {{0.0, 0.0}}},
                    NodeSpec{{Exponential{2.0}}, {{0.0, 0.0}}}},
                   {1.0, 3.0}};
  SimConfig cfg;
  cfg.seed = 4;
  cfg.horizon = 1e5;
  cfg.warmup = 1e4;
  EXPECT_LE(product_form_deviation(simulate(spec, cfg)), 0.005);
}

TEST(Compare, ZeroArrivals) {
  auto spec = two_node_deadline_network();
  spec.arrival_rates = {0.0, 0.0};
  SimConfig cfg;
  cfg.horizon = 100.0;
  cfg.warmup = 10.0;
  const auto rep = compare(spec, simulate(spec, cfg));
  for (const auto& row : rep.mean_table) {
    EXPECT_EQ(row.simulated, 0.0);
    EXPECT_EQ(row.exact, 0.0);
    EXPECT_EQ(row.full_insensitivity, 0.0);
    EXPECT_EQ(row.service_time_insensitivity, 0.0);
  }
  for (double d : rep.marginal_distance) EXPECT_EQ(d, 0.0);
  EXPECT_EQ(*rep.product_form_sup, 0.0);
}

TEST(Compare, ExponentialColumnsCoincide) {
  NetworkSpec spec{{NodeSpec{{Exponential{1.0}, Exponential{0.5}}, {{0.0, 0.6}, {0.2, 0.0}}},
                    NodeSpec{{Exponential{2.0}, Exponential{1.0}}, {{0.3, 0.0}, {0.0, 0.0}}}},
                   {1.0, 0.5}};
  SimConfig cfg;
  cfg.horizon = 200.0;
  cfg.warmup = 20.0;
  cfg.record_joint = false;
  const auto rep = compare(spec, simulate(spec, cfg));
  EXPECT_FALSE(rep.product_form_sup.has_value());
  for (const auto& row : rep.mean_table) {
    EXPECT_NEAR(row.full_insensitivity, row.exact, 1e-9);
    EXPECT_NEAR(row.service_time_insensitivity, row.exact, 1e-9);
  }
}

}  // namespace
}  // namespace isnet
