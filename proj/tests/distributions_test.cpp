#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "isnet/config.hpp"
#include "isnet/distributions.hpp"
#include "support/monte_carlo_oracle.hpp"
#include "support/random_networks.hpp"

namespace isnet {
namespace {

const double kE1 = std::exp(-1.0);

TEST(Survival, Definitions) {
  EXPECT_NEAR(survival(Exponential{1.0}, 1.0), 0.36787944117144233, 1e-15);
  EXPECT_EQ(survival(Deterministic{1.0}, 0.5), 1.0);
  EXPECT_EQ(survival(Deterministic{1.0}, 1.0), 0.0);
  EXPECT_EQ(survival(Infinite{}, 1e9), 1.0);
  EXPECT_DOUBLE_EQ(survival(Uniform{1.0, 3.0}, 2.5), 0.25);
  EXPECT_DOUBLE_EQ(survival(Weibull{2.0, 1.0}, 1.0), kE1);
}

TEST(Sample, PointMassAndDeterminism) {
  RandomStream rng(5);
  EXPECT_EQ(sample(Deterministic{1.0}, rng), 1.0);
  RandomStream a(42), b(42);
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(sample(Weibull{1.5, 2.0}, a), sample(Weibull{1.5, 2.0}, b));
  }
  EXPECT_THROW(sample(Infinite{}, rng), ContractViolation);
}

TEST(Sample, ExponentialLawOfLargeNumbers) {
  RandomStream rng(2024);
  double sum = 0.0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) sum += sample(Exponential{1.0}, rng);
  EXPECT_NEAR(sum / n, 1.0, 0.01);
}

TEST(Sample, MeansOfEveryLaw) {
  const std::vector<ServiceDistribution> laws{Exponential{2.0}, Uniform{0.5, 1.5},
                                              Weibull{0.7, 1.2}, Weibull{3.0, 2.0}};
  for (const auto& law : laws) {
    RandomStream rng(11);
    double sum = 0.0, sq = 0.0;
    const int n = 400'000;
    for (int i = 0; i < n; ++i) {
      const double x = sample(law, rng);
      sum += x;
      sq += x * x;
    }
    const double m = sum / n;
    const double se = std::sqrt((sq / n - m * m) / n);
    EXPECT_NEAR(m, mean(law), 4 * se) << format_number(mean(law));
  }
}

TEST(MinProbability, ExponentialAgainstDeadline) {
  const std::vector<ServiceDistribution> c{Exponential{1.0}, Deterministic{1.0}};
  EXPECT_NEAR(min_probability(c, 0), 1.0 - kE1, 1e-12);
  EXPECT_NEAR(min_probability(c, 1), kE1, 1e-15);
}

TEST(MinProbability, SingleComponent) {
  EXPECT_NEAR(min_probability({Weibull{0.7, 2.0}}, 0), 1.0, 1e-12);
  EXPECT_EQ(min_probability({Deterministic{3.0}}, 0), 1.0);
  EXPECT_NEAR(min_probability({Uniform{1.0, 2.0}, Infinite{}}, 0), 1.0, 1e-12);
  EXPECT_EQ(min_probability({Uniform{1.0, 2.0}, Infinite{}}, 1), 0.0);
}

TEST(MinProbability, ExponentialRace) {
  for (auto [a, b] : {std::pair{1.0, 1.0}, {0.3, 4.0}, {10.0, 0.01}}) {
    const std::vector<ServiceDistribution> c{Exponential{a}, Exponential{b}};
    EXPECT_NEAR(min_probability(c, 0), a / (a + b), 1e-11);
    EXPECT_NEAR(expected_min(c), 1.0 / (a + b), 1e-11);
  }
}

TEST(ConditionalMean, TruncatedExponential) {
  const std::vector<ServiceDistribution> c{Exponential{1.0}, Deterministic{1.0}};
  // 1 / mu_{1,1} with mu_1 = deadline = 1
  EXPECT_NEAR(conditional_mean_given_min(c, 0), (1.0 - 2.0 * kE1) / (1.0 - kE1), 1e-11);
  EXPECT_NEAR(conditional_mean_given_min(c, 1), 1.0, 1e-15);
  EXPECT_NEAR(conditional_mean_given_min({Exponential{4.0}}, 0), 0.25, 1e-11);
}

TEST(ConditionalMean, LosingComponentIsContractViolation) {
  EXPECT_THROW(conditional_mean_given_min({Uniform{2.0, 3.0}, Deterministic{1.0}}, 0),
               ContractViolation);
}

TEST(ExpectedMin, ClosedForms) {
  EXPECT_NEAR(expected_min({Exponential{1.0}, Deterministic{1.0}}), 1.0 - kE1, 1e-12);
  EXPECT_NEAR(expected_min({Deterministic{2.5}}), 2.5, 1e-12);
  EXPECT_NEAR(expected_min({Uniform{0.0, 2.0}, Uniform{0.0, 2.0}}), 2.0 / 3.0, 1e-12);
}

TEST(MinStats, TwoNodeDeadlineNetwork) {
  const auto stats = compute_min_stats(two_node_deadline_network());
  for (std::size_t n = 0; n < 2; ++n) {
    EXPECT_NEAR(stats.p[n][0], 0.632120558828558, 1e-9);
    EXPECT_NEAR(stats.p[n][1], 0.367879441171442, 1e-9);
    EXPECT_NEAR(stats.cond_mean[n][0], 0.418023293130674, 1e-9);
    EXPECT_NEAR(stats.cond_mean[n][1], 1.0, 1e-9);
    EXPECT_NEAR(stats.mean_min[n], 0.632120558828558, 1e-9);
  }
}

TEST(MinStats, IndicatorRowWhenOnlyOneFinite) {
  NetworkSpec spec{{NodeSpec{{Infinite{}, Weibull{2.0, 1.0}, Infinite{}}, {{0.0}, {0.0}, {0.0}}}},
                   {1.0}};
  const auto stats = compute_min_stats(spec);
  EXPECT_EQ(stats.p[0][0], 0.0);
  EXPECT_NEAR(stats.p[0][1], 1.0, 1e-12);
  EXPECT_EQ(stats.p[0][2], 0.0);
  EXPECT_NEAR(stats.cond_mean[0][1], std::tgamma(1.5), 1e-10);
}

// Monte Carlo oracle on the worked network, 10^6 joint draws per node.
TEST(MinStats, AgreesWithMonteCarloOracle) {
  const auto spec = two_node_deadline_network();
  const auto stats = compute_min_stats(spec);
  for (std::size_t n = 0; n < spec.num_nodes(); ++n) {
    const auto mc = testing::monte_carlo_min_stats(spec.nodes[n].components, 1'000'000, 17 + n);
    for (std::size_t k = 0; k < 2; ++k) {
      EXPECT_NEAR(stats.p[n][k], mc.p[k], 3 * mc.p_se[k]);
      EXPECT_NEAR(stats.cond_mean[n][k], mc.cond_mean[k], std::max(3 * mc.cond_mean_se[k], 1e-9));
    }
  }
}

// Property: probabilities sum to one, the total-expectation identity holds,
// and all-exponential lists obey the race formulas.
TEST(MinStatsProperty, RandomComponentLists) {
  testing::NetworkGenerator gen(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ServiceDistribution> comps;
    std::vector<double> atoms;
    const std::size_t k = gen.index(1, 4);
    for (std::size_t i = 0; i < k; ++i) comps.push_back(gen.any_law(atoms));
    if (std::all_of(comps.begin(), comps.end(), [](const auto& d) { return is_infinite(d); })) {
      comps.push_back(Exponential{1.0});
    }
    double total = 0.0, weighted = 0.0;
    for (std::size_t j = 0; j < comps.size(); ++j) {
      const double p = min_probability(comps, j);
      EXPECT_GE(p, 0.0);
      total += p;
      if (p > 0.0) weighted += p * conditional_mean_given_min(comps, j);
      if (!can_achieve_minimum(comps, j)) {
        EXPECT_EQ(p, 0.0);
      }
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
    EXPECT_NEAR(weighted, expected_min(comps), 1e-8);
  }
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ServiceDistribution> comps;
    double rate_sum = 0.0;
    const std::size_t k = gen.index(1, 4);
    for (std::size_t i = 0; i < k; ++i) {
      const double r = gen.uniform(0.1, 5.0);
      rate_sum += r;
      comps.push_back(Exponential{r});
    }
    for (std::size_t j = 0; j < k; ++j) {
      EXPECT_NEAR(min_probability(comps, j), std::get<Exponential>(comps[j]).rate / rate_sum,
                  1e-10);
      EXPECT_NEAR(conditional_mean_given_min(comps, j), 1.0 / rate_sum, 1e-10);
    }
    EXPECT_NEAR(expected_min(comps), 1.0 / rate_sum, 1e-10);
  }
}

TEST(ConditionalSampler, MatchesConditionalMean) {
  const std::vector<ServiceDistribution> c{Exponential{1.0}, Deterministic{1.0}};
  RandomStream rng(3);
  double sum = 0.0;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) {
    const double x = sample_conditional(c, 0, rng);
    ASSERT_LT(x, 1.0);
    sum += x;
  }
  // sd of the truncated exponential is below 0.3
  EXPECT_NEAR(sum / n, conditional_mean_given_min(c, 0), 4 * 0.3 / std::sqrt(n));
}

}  // namespace
}  // namespace isnet
