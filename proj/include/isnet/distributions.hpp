#pragma once

// Per-law survival/quantile/sampling and the competing-minimum statistics
// (achievement probability, conditional mean given the win, expected
// minimum) that the equilibrium solver consumes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "isnet/errors.hpp"
#include "isnet/model.hpp"
#include "isnet/quadrature.hpp"
#include "isnet/random.hpp"

namespace isnet {

/// P(S > t).
inline double survival(const ServiceDistribution& d, double t) {
  struct V {
    double t;
    double operator()(const Exponential& x) const { return std::exp(-x.rate * t); }
    double operator()(const Deterministic& x) const { return t < x.value ? 1.0 : 0.0; }
    double operator()(const Uniform& x) const {
      if (t <= x.lo) return 1.0;
      if (t >= x.hi) return 0.0;
      return (x.hi - t) / (x.hi - x.lo);
    }
    double operator()(const Weibull& x) const {
      return std::exp(-std::pow(t / x.scale, x.shape));
    }
    double operator()(const Infinite&) const { return 1.0; }
  };
  return std::visit(V{std::max(t, 0.0)}, d);
}

/// P(S <= t), computed without cancellation for the exponential families.
inline double cdf(const ServiceDistribution& d, double t) {
  struct V {
    double t;
    double operator()(const Exponential& x) const { return -std::expm1(-x.rate * t); }
    double operator()(const Deterministic& x) const { return t < x.value ? 0.0 : 1.0; }
    double operator()(const Uniform& x) const {
      if (t <= x.lo) return 0.0;
      if (t >= x.hi) return 1.0;
      return (t - x.lo) / (x.hi - x.lo);
    }
    double operator()(const Weibull& x) const {
      return -std::expm1(-std::pow(t / x.scale, x.shape));
    }
    double operator()(const Infinite&) const { return 0.0; }
  };
  return std::visit(V{std::max(t, 0.0)}, d);
}

/// Density of the atomless laws; zero for Deterministic and Infinite.
inline double density(const ServiceDistribution& d, double t) {
  struct V {
    double t;
    double operator()(const Exponential& x) const { return x.rate * std::exp(-x.rate * t); }
    double operator()(const Deterministic&) const { return 0.0; }
    double operator()(const Uniform& x) const {
      return (t >= x.lo && t < x.hi) ? 1.0 / (x.hi - x.lo) : 0.0;
    }
    double operator()(const Weibull& x) const {
      const double z = t / x.scale;
      return x.shape / x.scale * std::pow(z, x.shape - 1.0) *
             std::exp(-std::pow(z, x.shape));
    }
    double operator()(const Infinite&) const { return 0.0; }
  };
  return t < 0.0 ? 0.0 : std::visit(V{t}, d);
}

/// Inverse CDF on [0, 1).
inline double quantile(const ServiceDistribution& d, double u) {
  struct V {
    double u;
    double operator()(const Exponential& x) const { return -std::log1p(-u) / x.rate; }
    double operator()(const Deterministic& x) const { return x.value; }
    double operator()(const Uniform& x) const { return x.lo + u * (x.hi - x.lo); }
    double operator()(const Weibull& x) const {
      return x.scale * std::pow(-std::log1p(-u), 1.0 / x.shape);
    }
    double operator()(const Infinite&) const {
      throw ContractViolation("quantile of an Infinite component");
    }
  };
  return std::visit(V{u}, d);
}

/// Unconditional mean; +inf for Infinite.
inline double mean(const ServiceDistribution& d) {
  struct V {
    double operator()(const Exponential& x) const { return 1.0 / x.rate; }
    double operator()(const Deterministic& x) const { return x.value; }
    double operator()(const Uniform& x) const { return 0.5 * (x.lo + x.hi); }
    double operator()(const Weibull& x) const {
      return x.scale * std::tgamma(1.0 + 1.0 / x.shape);
    }
    double operator()(const Infinite&) const {
      return std::numeric_limits<double>::infinity();
    }
  };
  return std::visit(V{}, d);
}

/// One inverse-transform draw. Deterministic laws consume no randomness.
inline double sample(const ServiceDistribution& d, RandomStream& rng) {
  if (is_infinite(d)) throw ContractViolation("cannot sample an Infinite component");
  if (const auto* det = std::get_if<Deterministic>(&d)) return det->value;
  return quantile(d, rng.uniform());
}

namespace detail {

// Survival below this is treated as zero when truncating integration ranges.
inline constexpr double kTailMass = 1e-17;

inline double tail_point(const ServiceDistribution& d) {
  const double x = -std::log(kTailMass);
  struct V {
    double x;
    double operator()(const Exponential& e) const { return x / e.rate; }
    double operator()(const Deterministic& e) const { return e.value; }
    double operator()(const Uniform& e) const { return e.hi; }
    double operator()(const Weibull& e) const {
      return e.scale * std::pow(x, 1.0 / e.shape);
    }
    double operator()(const Infinite&) const {
      return std::numeric_limits<double>::infinity();
    }
  };
  return std::visit(V{x}, d);
}

// Points where some survival function jumps or has a kink.
inline std::vector<double> kinks(const ServiceDistribution& d) {
  if (const auto* det = std::get_if<Deterministic>(&d)) return {det->value};
  if (const auto* uni = std::get_if<Uniform>(&d)) return {uni->lo, uni->hi};
  return {};
}

inline double others_survival(const std::vector<ServiceDistribution>& comps,
                              std::size_t k, double t) {
  double s = 1.0;
  for (std::size_t j = 0; j < comps.size(); ++j) {
    if (j != k) s *= survival(comps[j], t);
  }
  return s;
}

inline void require_index(const std::vector<ServiceDistribution>& comps, std::size_t k) {
  if (k >= comps.size()) throw ContractViolation("component index out of range");
  if (std::all_of(comps.begin(), comps.end(), [](const auto& d) { return is_infinite(d); })) {
    throw ContractViolation("component list has no finite component");
  }
}

struct WinMoments {
  double probability = 0.0;  // P(S_k = min)
  double first = 0.0;        // E[S_k 1{S_k = min}]
};

// Moments of S_k restricted to the event that k wins. For atomless k the
// integrals are taken over u = F_k(t), which turns f_k(t) dt into du and
// removes density singularities at the origin.
inline WinMoments win_moments(const std::vector<ServiceDistribution>& comps, std::size_t k,
                              bool want_first) {
  require_index(comps, k);
  WinMoments out;
  if (!can_achieve_minimum(comps, k)) return out;
  const auto& law = comps[k];
  if (const auto* det = std::get_if<Deterministic>(&law)) {
    out.probability = others_survival(comps, k, det->value);
    out.first = det->value * out.probability;
    return out;
  }

  double t_end = tail_point(law);
  std::vector<double> t_breaks;
  for (std::size_t j = 0; j < comps.size(); ++j) {
    if (j == k) continue;
    t_end = std::min({t_end, tail_point(comps[j]), support_upper(comps[j])});
    for (double b : kinks(comps[j])) t_breaks.push_back(b);
  }
  const double u_end = cdf(law, t_end);
  std::vector<double> u_breaks;
  for (double b : t_breaks) {
    const double u = cdf(law, b);
    if (u > 0.0 && u < u_end) u_breaks.push_back(u);
  }

  auto weight = [&](double u) { return others_survival(comps, k, quantile(law, u)); };
  out.probability = quadrature::integrate(weight, 0.0, u_end, u_breaks).value;
  if (want_first) {
    auto weighted = [&](double u) {
      const double t = quantile(law, u);
      return t * others_survival(comps, k, t);
    };
    out.first = quadrature::integrate(weighted, 0.0, u_end, u_breaks).value;
  }
  return out;
}

}  // namespace detail

/// P(S_k = min_j S_j) for independent components.
inline double min_probability(const std::vector<ServiceDistribution>& comps, std::size_t k) {
  return detail::win_moments(comps, k, false).probability;
}

/// E[S_k | S_k = min_j S_j]. Requires min_probability(comps, k) > 0.
inline double conditional_mean_given_min(const std::vector<ServiceDistribution>& comps,
                                         std::size_t k) {
  const auto m = detail::win_moments(comps, k, true);
  if (!(m.probability > 0.0)) {
    throw ContractViolation("component " + std::to_string(k + 1) +
                            " never achieves the minimum");
  }
  return m.first / m.probability;
}

/// E[min_j S_j] = integral of the joint survival over [0, inf).
inline double expected_min(const std::vector<ServiceDistribution>& comps) {
  detail::require_index(comps, 0);
  double t_end = std::numeric_limits<double>::infinity();
  std::vector<double> breaks;
  for (const auto& d : comps) {
    t_end = std::min({t_end, detail::tail_point(d), support_upper(d)});
    for (double b : detail::kinks(d)) breaks.push_back(b);
  }
  auto joint = [&](double t) {
    double s = 1.0;
    for (const auto& d : comps) s *= survival(d, t);
    return s;
  };
  std::erase_if(breaks, [&](double b) { return !(b > 0.0 && b < t_end); });
  return quadrature::integrate(joint, 0.0, t_end, breaks).value;
}

/// Draws the component times until component k wins; returns the winning
/// time. Used to sample S_k | (S_k = min).
inline double sample_conditional(const std::vector<ServiceDistribution>& comps,
                                 std::size_t k, RandomStream& rng,
                                 std::size_t max_attempts = 10'000'000) {
  detail::require_index(comps, k);
  if (!can_achieve_minimum(comps, k)) {
    throw ContractViolation("component never achieves the minimum");
  }
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    const double candidate = sample(comps[k], rng);
    bool wins = true;
    for (std::size_t j = 0; j < comps.size() && wins; ++j) {
      if (j == k || is_infinite(comps[j])) continue;
      wins = candidate < sample(comps[j], rng);
    }
    if (wins) return candidate;
  }
  throw NumericalError("conditional sampler exceeded its attempt budget");
}

/// Achievement probabilities and conditional means for every (node, component).
struct MinStats {
  /// p[n][k] = P(S_{n,k} = S_n)
  std::vector<std::vector<double>> p;
  /// cond_mean[n][k] = E[S_{n,k} | S_{n,k} = S_n]; 0 where p[n][k] = 0.
  std::vector<std::vector<double>> cond_mean;
  /// mean_min[n] = E[S_n]
  std::vector<double> mean_min;
};

inline MinStats compute_min_stats(const NetworkSpec& spec) {
  MinStats stats;
  for (std::size_t n = 0; n < spec.num_nodes(); ++n) {
    const auto& comps = spec.nodes[n].components;
    std::vector<double> p(comps.size(), 0.0);
    std::vector<double> cm(comps.size(), 0.0);
    for (std::size_t k = 0; k < comps.size(); ++k) {
      try {
        const auto m = detail::win_moments(comps, k, true);
        p[k] = m.probability;
        cm[k] = m.probability > 0.0 ? m.first / m.probability : 0.0;
      } catch (const NumericalError& e) {
        throw NumericalError("node " + std::to_string(n + 1) + ", component " +
                             std::to_string(k + 1) + ": " + e.what());
      }
    }
    double mm = 0.0;
    try {
      mm = expected_min(comps);
    } catch (const NumericalError& e) {
      throw NumericalError("node " + std::to_string(n + 1) + ": " + e.what());
    }
    stats.p.push_back(std::move(p));
    stats.cond_mean.push_back(std::move(cm));
    stats.mean_min.push_back(mm);
  }
  return stats;
}

}  // namespace isnet
