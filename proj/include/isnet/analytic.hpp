#pragma once

// Exact equilibrium of the deadline-routed infinite-server network: traffic
// equations over (node, component) pairs, the Poisson product form, the
// equivalent Markov-routed expanded network, and the two naive baselines
// that treat the network as a Jackson network.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "isnet/distributions.hpp"
#include "isnet/errors.hpp"
#include "isnet/linalg.hpp"
#include "isnet/model.hpp"
#include "isnet/random.hpp"

namespace isnet {

inline constexpr double kResidualTol = 1e-10;

namespace detail {

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Solves (I - A) x = b and enforces the openness postconditions: a regular
// system, a nonnegative solution and a small residual.
inline std::vector<double> solve_open_system(const Matrix& a, const std::vector<double>& b) {
  const std::size_t n = b.size();
  Matrix lhs = Matrix::identity(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) lhs(r, c) -= a(r, c);
  }
  std::vector<double> x;
  try {
    x = solve_dense(lhs, b);
  } catch (const NumericalError& e) {
    throw OpennessError(std::string("network not open or numerically degenerate: ") + e.what(),
                        kNoIndex);
  }
  const double scale = std::max(1.0, max_abs(x));
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || x[i] < -1e-12 * scale) {
      throw OpennessError("network not open or numerically degenerate: negative flow at index " +
                              std::to_string(i),
                          i);
    }
    x[i] = std::max(x[i], 0.0);
  }
  const auto lx = lhs.multiply(x);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(lx[i] - b[i]) > kResidualTol * scale) {
      throw OpennessError(
          "network not open or numerically degenerate: residual too large at index " +
              std::to_string(i),
          i);
    }
  }
  return x;
}

}  // namespace detail

struct TrafficSolution {
  /// alpha[n][k]: total flow into (node n, component k).
  std::vector<std::vector<double>> alpha;
  /// Max-norm residual of the traffic equations at the returned alpha.
  double residual = 0.0;

  double node_flow(std::size_t n) const {
    double s = 0.0;
    for (double a : alpha[n]) s += a;
    return s;
  }
};

/// Solves alpha[n][k] = p[n][k] * (lambda_n + sum_{m,l} P^l_{m,n} alpha[m][l]).
inline TrafficSolution solve_traffic(const NetworkSpec& spec, const MinStats& stats) {
  const std::size_t n_nodes = spec.num_nodes();
  const std::size_t k_count = spec.num_components();
  const std::size_t size = n_nodes * k_count;
  auto idx = [k_count](std::size_t n, std::size_t k) { return n * k_count + k; };

  Matrix feed(size, size);
  std::vector<double> external(size, 0.0);
  for (std::size_t n = 0; n < n_nodes; ++n) {
    for (std::size_t k = 0; k < k_count; ++k) {
      const double p = stats.p[n][k];
      external[idx(n, k)] = p * spec.arrival_rates[n];
      for (std::size_t m = 0; m < n_nodes; ++m) {
        for (std::size_t l = 0; l < k_count; ++l) {
          feed(idx(n, k), idx(m, l)) = p * spec.nodes[m].routing[l][n];
        }
      }
    }
  }
  auto flat = detail::solve_open_system(feed, external);

  TrafficSolution sol;
  sol.alpha.assign(n_nodes, std::vector<double>(k_count, 0.0));
  for (std::size_t n = 0; n < n_nodes; ++n) {
    for (std::size_t k = 0; k < k_count; ++k) {
      if (stats.p[n][k] > 0.0) sol.alpha[n][k] = flat[idx(n, k)];
    }
  }
  for (std::size_t n = 0; n < n_nodes; ++n) {
    for (std::size_t k = 0; k < k_count; ++k) {
      const auto row = idx(n, k);
      double lhs = sol.alpha[n][k] - external[row];
      for (std::size_t col = 0; col < size; ++col) {
        lhs -= feed(row, col) * sol.alpha[col / k_count][col % k_count];
      }
      sol.residual = std::max(sol.residual, std::abs(lhs));
    }
  }
  return sol;
}

/// Poisson(rho) probability of x.
inline double poisson_pmf(double rho, std::size_t x) {
  if (rho <= 0.0) return x == 0 ? 1.0 : 0.0;
  const double xd = static_cast<double>(x);
  return std::exp(xd * std::log(rho) - rho - std::lgamma(xd + 1.0));
}

/// Largest state kept when a Poisson(rho) pmf is tabulated; the tail beyond
/// it carries less than 1e-12 of the mass.
inline std::size_t poisson_support_limit(double rho) {
  return static_cast<std::size_t>(std::ceil(rho + 12.0 * std::sqrt(rho) + 30.0));
}

/// Poisson(rho) tabulated over 0..poisson_support_limit(rho).
inline std::vector<double> poisson_table(double rho) {
  std::vector<double> pmf(poisson_support_limit(rho) + 1);
  for (std::size_t x = 0; x < pmf.size(); ++x) pmf[x] = poisson_pmf(rho, x);
  return pmf;
}

/// Independent Poisson marginals with means rho.
class ProductForm {
 public:
  ProductForm(MinStats stats, TrafficSolution traffic)
      : stats_(std::move(stats)), traffic_(std::move(traffic)) {
    for (std::size_t n = 0; n < traffic_.alpha.size(); ++n) {
      double r = 0.0;
      for (std::size_t k = 0; k < traffic_.alpha[n].size(); ++k) {
        r += traffic_.alpha[n][k] * stats_.cond_mean[n][k];
      }
      rho_.push_back(r);
    }
  }

  const std::vector<double>& rho() const { return rho_; }
  const MinStats& stats() const { return stats_; }
  const TrafficSolution& traffic() const { return traffic_; }
  std::size_t num_nodes() const { return rho_.size(); }

  double marginal(std::size_t n, std::size_t x) const { return poisson_pmf(rho_[n], x); }

  std::vector<double> marginal_table(std::size_t n) const { return poisson_table(rho_[n]); }

  double joint(const std::vector<std::size_t>& xs) const {
    if (xs.size() != rho_.size()) throw ContractViolation("joint: state has wrong length");
    double p = 1.0;
    for (std::size_t n = 0; n < xs.size(); ++n) p *= marginal(n, xs[n]);
    return p;
  }

 private:
  MinStats stats_;
  TrafficSolution traffic_;
  std::vector<double> rho_;
};

inline ProductForm product_form(const NetworkSpec& spec, const MinStats& stats) {
  return ProductForm(stats, solve_traffic(spec, stats));
}

/// Validates the spec, then runs min statistics, the traffic solve and the
/// occupancy means.
inline ProductForm product_form(const NetworkSpec& spec) {
  require_valid(spec);
  return product_form(spec, compute_min_stats(spec));
}

/// One node of the expanded network: the original node's service restricted
/// to the event that `component` wins.
struct ExpandedNode {
  std::size_t node;
  std::size_t component;
  double external_rate;
  /// E[S_{n,k} | S_{n,k} = S_n]; 0 when the component can never win.
  double mean_service;
  /// The full competitor list of the original node (for conditional sampling).
  std::vector<ServiceDistribution> competitors;

  double service_rate() const {
    return mean_service > 0.0 ? 1.0 / mean_service : std::numeric_limits<double>::infinity();
  }
};

/// N*K single-component network with Markov routing
/// (n,k) -> (m,l) with probability P^k_{n,m} * p[m][l].
struct ExpandedNetwork {
  std::size_t original_nodes = 0;
  std::size_t components = 0;
  std::vector<ExpandedNode> nodes;
  /// routing(i, j) between expanded nodes; row deficit is the exit probability.
  Matrix routing;
  /// supernode[i]: original node of expanded node i.
  std::vector<std::size_t> supernode;

  std::size_t index(std::size_t n, std::size_t k) const { return n * components + k; }

  double exit_probability(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < routing.cols(); ++j) s += routing(i, j);
    return std::max(0.0, 1.0 - s);
  }

  double sample_service(std::size_t i, RandomStream& rng) const {
    return sample_conditional(nodes[i].competitors, nodes[i].component, rng);
  }
};

inline ExpandedNetwork expand_network(const NetworkSpec& spec, const MinStats& stats) {
  ExpandedNetwork ex;
  ex.original_nodes = spec.num_nodes();
  ex.components = spec.num_components();
  const std::size_t size = ex.original_nodes * ex.components;
  ex.routing = Matrix(size, size);
  for (std::size_t n = 0; n < ex.original_nodes; ++n) {
    for (std::size_t k = 0; k < ex.components; ++k) {
      ex.nodes.push_back({n, k, stats.p[n][k] * spec.arrival_rates[n], stats.cond_mean[n][k],
                          spec.nodes[n].components});
      ex.supernode.push_back(n);
      for (std::size_t m = 0; m < ex.original_nodes; ++m) {
        for (std::size_t l = 0; l < ex.components; ++l) {
          ex.routing(ex.index(n, k), ex.index(m, l)) =
              spec.nodes[n].routing[k][m] * stats.p[m][l];
        }
      }
    }
  }
  return ex;
}

inline ExpandedNetwork expand_network(const NetworkSpec& spec) {
  require_valid(spec);
  return expand_network(spec, compute_min_stats(spec));
}

struct ExpandedSolution {
  /// Flow into each expanded node.
  std::vector<double> flow;
  /// rho_component[n][k] = flow(n,k) * E[S_{n,k} | win].
  std::vector<std::vector<double>> rho_component;
  /// Supernode totals sum_k rho_component[n][k].
  std::vector<double> rho;
};

/// Classical open-network solve on the expanded (Markov) network:
/// flow = external + routing^T flow, then rho = flow / service rate.
inline ExpandedSolution solve_expanded(const ExpandedNetwork& ex) {
  const std::size_t size = ex.nodes.size();
  Matrix transposed(size, size);
  std::vector<double> external(size);
  for (std::size_t i = 0; i < size; ++i) {
    external[i] = ex.nodes[i].external_rate;
    for (std::size_t j = 0; j < size; ++j) transposed(i, j) = ex.routing(j, i);
  }
  ExpandedSolution sol;
  sol.flow = detail::solve_open_system(transposed, external);
  sol.rho_component.assign(ex.original_nodes, std::vector<double>(ex.components, 0.0));
  sol.rho.assign(ex.original_nodes, 0.0);
  for (std::size_t i = 0; i < size; ++i) {
    const auto& node = ex.nodes[i];
    const double r = node.mean_service > 0.0 ? sol.flow[i] / node.service_rate() : 0.0;
    sol.rho_component[node.node][node.component] = r;
  }
  for (std::size_t n = 0; n < ex.original_nodes; ++n) {
    for (double r : sol.rho_component[n]) sol.rho[n] += r;
  }
  return sol;
}

enum class BaselineMethod { FullInsensitivity, ServiceTimeInsensitivity };

inline const char* to_string(BaselineMethod m) {
  return m == BaselineMethod::FullInsensitivity ? "full_insensitivity"
                                                : "service_time_insensitivity";
}

struct BaselineResult {
  BaselineMethod method;
  std::vector<double> rho;
  /// Node-to-node routing the baseline used (Q or Q-tilde).
  Matrix routing_used;
  /// mu_n = sum_k 1 / E[S_{n,k}].
  std::vector<double> rates_used;
};

namespace detail {

// Exponentialised component rates 1/E[S_{n,k}]. Infinite components (the
// padding representation) contribute rate 0.
inline std::vector<std::vector<double>> exponential_rates(const NetworkSpec& spec) {
  std::vector<std::vector<double>> rates;
  for (std::size_t n = 0; n < spec.num_nodes(); ++n) {
    std::vector<double> row;
    for (const auto& d : spec.nodes[n].components) {
      const double m = mean(d);
      if (is_infinite(d)) {
        row.push_back(0.0);
      } else if (!(std::isfinite(m) && m > 0.0)) {
        throw ContractViolation("node " + std::to_string(n + 1) +
                                ": baseline needs finite positive component means");
      } else {
        row.push_back(1.0 / m);
      }
    }
    rates.push_back(std::move(row));
  }
  return rates;
}

inline BaselineResult jackson_baseline(const NetworkSpec& spec, BaselineMethod method,
                                       const std::vector<std::vector<double>>& weights,
                                       const std::vector<double>& node_rates) {
  const std::size_t n_nodes = spec.num_nodes();
  BaselineResult res{method, {}, Matrix(n_nodes, n_nodes), node_rates};
  for (std::size_t n = 0; n < n_nodes; ++n) {
    for (std::size_t k = 0; k < weights[n].size(); ++k) {
      for (std::size_t m = 0; m < n_nodes; ++m) {
        res.routing_used(n, m) += weights[n][k] * spec.nodes[n].routing[k][m];
      }
    }
  }
  Matrix transposed(n_nodes, n_nodes);
  for (std::size_t n = 0; n < n_nodes; ++n) {
    for (std::size_t m = 0; m < n_nodes; ++m) transposed(n, m) = res.routing_used(m, n);
  }
  const auto flow = solve_open_system(transposed, spec.arrival_rates);
  for (std::size_t n = 0; n < n_nodes; ++n) res.rho.push_back(flow[n] / node_rates[n]);
  return res;
}

inline std::vector<double> summed_rates(const std::vector<std::vector<double>>& rates) {
  std::vector<double> out;
  for (const auto& row : rates) {
    double s = 0.0;
    for (double r : row) s += r;
    out.push_back(s);
  }
  return out;
}

}  // namespace detail

/// Treats every component as exponential with its true mean: node rate is
/// the summed rate and routing weights are the exponential race odds.
inline BaselineResult baseline_full_insensitivity(const NetworkSpec& spec) {
  require_valid(spec);
  const auto rates = detail::exponential_rates(spec);
  const auto node_rates = detail::summed_rates(rates);
  auto weights = rates;
  for (std::size_t n = 0; n < weights.size(); ++n) {
    for (double& w : weights[n]) w /= node_rates[n];
  }
  return detail::jackson_baseline(spec, BaselineMethod::FullInsensitivity, weights, node_rates);
}

/// Uses the true achievement probabilities for routing but keeps the summed
/// exponentialised rate as the service rate.
inline BaselineResult baseline_service_time_insensitivity(const NetworkSpec& spec,
                                                          const MinStats& stats) {
  require_valid(spec);
  const auto node_rates = detail::summed_rates(detail::exponential_rates(spec));
  return detail::jackson_baseline(spec, BaselineMethod::ServiceTimeInsensitivity, stats.p,
                                  node_rates);
}

inline BaselineResult baseline_service_time_insensitivity(const NetworkSpec& spec) {
  require_valid(spec);
  return baseline_service_time_insensitivity(spec, compute_min_stats(spec));
}

}  // namespace isnet
