#pragma once

// Empirical-versus-exact comparison metrics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "isnet/analytic.hpp"
#include "isnet/errors.hpp"
#include "isnet/simulate.hpp"

namespace isnet {

/// Probability mass function over 0, 1, 2, ...
using Pmf = std::vector<double>;

/// Time-average distribution of node n's occupancy.
inline Pmf empirical_marginal(const SimResult& result, std::size_t n) {
  if (!(result.effective_duration > 0.0)) {
    throw ContractViolation("empirical_marginal: no observation window");
  }
  Pmf pmf = result.marginal_weights.at(n);
  for (double& w : pmf) w /= result.effective_duration;
  return pmf;
}

/// Half the L1 distance over the union of the supports.
inline double total_variation(const Pmf& p, const Pmf& q) {
  const std::size_t size = std::max(p.size(), q.size());
  double sum = 0.0;
  for (std::size_t x = 0; x < size; ++x) {
    const double a = x < p.size() ? p[x] : 0.0;
    const double b = x < q.size() ? q[x] : 0.0;
    sum += std::abs(a - b);
  }
  return std::min(1.0, 0.5 * sum);
}

/// sup over x of |pi(x) - prod_n pi_n(x_n)| where pi is the empirical joint
/// and pi_n its marginals. States are enumerated over the box spanned by
/// each node's visited range; unvisited states count with pi(x) = 0.
inline double product_form_deviation(const SimResult& result) {
  if (!result.config.record_joint) {
    throw ContractViolation("product_form_deviation needs a joint histogram");
  }
  const double duration = result.effective_duration;
  const std::size_t n_nodes = result.marginal_weights.size();
  std::vector<Pmf> marginals;
  for (std::size_t n = 0; n < n_nodes; ++n) marginals.push_back(empirical_marginal(result, n));

  double sup = 0.0;
  OccupancyVector x(n_nodes, 0);
  while (true) {
    double product = 1.0;
    for (std::size_t n = 0; n < n_nodes; ++n) product *= marginals[n][x[n]];
    const auto it = result.joint_weights.find(x);
    const double joint = it == result.joint_weights.end() ? 0.0 : it->second / duration;
    sup = std::max(sup, std::abs(joint - product));

    std::size_t n = 0;
    for (; n < n_nodes; ++n) {
      if (++x[n] < marginals[n].size()) break;
      x[n] = 0;
    }
    if (n == n_nodes) break;
  }
  return sup;
}

struct MeanRow {
  double simulated;
  double exact;
  double full_insensitivity;
  double service_time_insensitivity;
};

struct SampleInfo {
  double horizon;
  double warmup;
  double effective_duration;
  std::uint64_t seed;
  std::uint64_t run;
};

struct ComparisonReport {
  /// One row per node.
  std::vector<MeanRow> mean_table;
  /// TV distance between the empirical marginal and Poisson(rho_n).
  std::vector<double> marginal_distance;
  /// Present when the joint histogram was recorded.
  std::optional<double> product_form_sup;
  SampleInfo sample_info;
};

inline ComparisonReport compare(const NetworkSpec& spec, const SimResult& result) {
  require_valid(spec);
  if (result.means.size() != spec.num_nodes()) {
    throw ContractViolation("compare: result does not match the network");
  }
  const auto stats = compute_min_stats(spec);
  const auto exact = product_form(spec, stats);
  const auto full = baseline_full_insensitivity(spec);
  const auto sti = baseline_service_time_insensitivity(spec, stats);

  ComparisonReport report;
  for (std::size_t n = 0; n < spec.num_nodes(); ++n) {
    report.mean_table.push_back({result.means[n], exact.rho()[n], full.rho[n], sti.rho[n]});
    report.marginal_distance.push_back(
        total_variation(empirical_marginal(result, n), exact.marginal_table(n)));
  }
  if (result.config.record_joint) report.product_form_sup = product_form_deviation(result);
  report.sample_info = {result.config.horizon, result.config.warmup, result.effective_duration,
                        result.config.seed, result.run};
  return report;
}

}  // namespace isnet
