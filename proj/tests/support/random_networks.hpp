#pragma once

// Seeded generators of valid networks for property tests.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "isnet/model.hpp"

namespace isnet::testing {

class NetworkGenerator {
 public:
  explicit NetworkGenerator(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(gen_);
  }

  ServiceDistribution any_law(std::vector<double>& used_atoms) {
    switch (index(0, 4)) {
      case 0: return Exponential{uniform(0.2, 3.0)};
      case 1: {
        double v = uniform(0.2, 3.0);
        for (double a : used_atoms) {
          if (a == v) v += 0.125;
        }
        used_atoms.push_back(v);
        return Deterministic{v};
      }
      case 2: {
        const double lo = uniform(0.0, 1.0);
        return Uniform{lo, lo + uniform(0.1, 2.0)};
      }
      case 3: return Weibull{uniform(0.6, 3.0), uniform(0.3, 2.0)};
      default: return Infinite{};
    }
  }

  /// Row with total mass at most 0.85 so every component leaves a deficit.
  std::vector<double> routing_row(std::size_t n) {
    std::vector<double> row(n, 0.0);
    double budget = uniform(0.0, 0.85);
    for (std::size_t m = 0; m < n; ++m) {
      if (index(0, 2) == 0) continue;
      const double share = uniform(0.0, budget);
      row[m] = share;
      budget -= share;
    }
    return row;
  }

  NetworkSpec exponential_network() { return network(true); }
  NetworkSpec general_network() { return network(false); }

 private:
  NetworkSpec network(bool exponential_only) {
    const std::size_t n = index(1, 4);
    const std::size_t k = index(1, 3);
    NetworkSpec spec;
    for (std::size_t i = 0; i < n; ++i) {
      NodeSpec node;
      std::vector<double> atoms;
      bool any_finite = false;
      for (std::size_t c = 0; c < k; ++c) {
        auto law = exponential_only ? ServiceDistribution{Exponential{uniform(0.2, 3.0)}}
                                    : any_law(atoms);
        if (c + 1 == k && !any_finite && is_infinite(law)) law = Exponential{uniform(0.2, 3.0)};
        any_finite = any_finite || !is_infinite(law);
        node.components.push_back(law);
        node.routing.push_back(routing_row(n));
      }
      spec.nodes.push_back(std::move(node));
      spec.arrival_rates.push_back(index(0, 3) == 0 ? 0.0 : uniform(0.1, 2.0));
    }
    spec.arrival_rates[0] = uniform(0.5, 2.0);
    return spec;
  }

  std::mt19937_64 gen_;
};

}  // namespace isnet::testing
