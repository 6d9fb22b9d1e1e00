#pragma once

// Network description: N infinite-server nodes, each with K competing
// service-time components and one routing row per component.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "isnet/errors.hpp"

namespace isnet {

struct Exponential {
  double rate;
  friend bool operator==(const Exponential&, const Exponential&) = default;
};

struct Deterministic {
  double value;
  friend bool operator==(const Deterministic&, const Deterministic&) = default;
};

struct Uniform {
  double lo;
  double hi;
  friend bool operator==(const Uniform&, const Uniform&) = default;
};

struct Weibull {
  double shape;
  double scale;
  friend bool operator==(const Weibull&, const Weibull&) = default;
};

/// A competing time that never fires.
struct Infinite {
  friend bool operator==(const Infinite&, const Infinite&) = default;
};

/// One competing service-time law.
using ServiceDistribution =
    std::variant<Exponential, Deterministic, Uniform, Weibull, Infinite>;

inline bool is_infinite(const ServiceDistribution& d) {
  return std::holds_alternative<Infinite>(d);
}

inline bool is_deterministic(const ServiceDistribution& d) {
  return std::holds_alternative<Deterministic>(d);
}

/// Smallest value in the support (the atom for Deterministic).
inline double support_lower(const ServiceDistribution& d) {
  struct V {
    double operator()(const Exponential&) const { return 0.0; }
    double operator()(const Deterministic& x) const { return x.value; }
    double operator()(const Uniform& x) const { return x.lo; }
    double operator()(const Weibull&) const { return 0.0; }
    double operator()(const Infinite&) const {
      return std::numeric_limits<double>::infinity();
    }
  };
  return std::visit(V{}, d);
}

/// Essential supremum of the support.
inline double support_upper(const ServiceDistribution& d) {
  struct V {
    double operator()(const Exponential&) const {
      return std::numeric_limits<double>::infinity();
    }
    double operator()(const Deterministic& x) const { return x.value; }
    double operator()(const Uniform& x) const { return x.hi; }
    double operator()(const Weibull&) const {
      return std::numeric_limits<double>::infinity();
    }
    double operator()(const Infinite&) const {
      return std::numeric_limits<double>::infinity();
    }
  };
  return std::visit(V{}, d);
}

/// True when component k attains the minimum with positive probability.
///
/// Decided from supports alone: k can win iff its lower support end lies
/// strictly below the upper support end of every other component.
inline bool can_achieve_minimum(const std::vector<ServiceDistribution>& comps,
                                std::size_t k) {
  if (is_infinite(comps[k])) return false;
  const double lo = support_lower(comps[k]);
  for (std::size_t j = 0; j < comps.size(); ++j) {
    if (j != k && !(lo < support_upper(comps[j]))) return false;
  }
  return true;
}

struct NodeSpec {
  std::vector<ServiceDistribution> components;
  /// routing[k][m]: probability of moving to node m after component k won.
  std::vector<std::vector<double>> routing;

  friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

struct NetworkSpec {
  std::vector<NodeSpec> nodes;
  std::vector<double> arrival_rates;

  std::size_t num_nodes() const { return nodes.size(); }
  std::size_t num_components() const {
    return nodes.empty() ? 0 : nodes.front().components.size();
  }

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

/// Pads every node with Infinite components (and empty routing rows) up to
/// the largest component count in the network.
inline NetworkSpec padded(NetworkSpec spec) {
  std::size_t k_max = 0;
  for (const auto& node : spec.nodes) {
    k_max = std::max(k_max, node.components.size());
  }
  const std::size_t n = spec.nodes.size();
  for (auto& node : spec.nodes) {
    while (node.components.size() < k_max) node.components.emplace_back(Infinite{});
    while (node.routing.size() < k_max) node.routing.emplace_back(n, 0.0);
  }
  return spec;
}

enum class ViolationKind {
  EmptyNetwork,
  ArrivalVectorSize,
  NegativeArrivalRate,
  ComponentCountMismatch,
  RoutingShape,
  InvalidParameter,
  NoFiniteComponent,
  TieProbabilityPositive,
  NegativeRouting,
  RowNotSubstochastic,
  NotOpen,
};

inline const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::EmptyNetwork: return "empty network";
    case ViolationKind::ArrivalVectorSize: return "arrival vector size";
    case ViolationKind::NegativeArrivalRate: return "negative arrival rate";
    case ViolationKind::ComponentCountMismatch: return "component count mismatch";
    case ViolationKind::RoutingShape: return "routing shape";
    case ViolationKind::InvalidParameter: return "invalid parameter";
    case ViolationKind::NoFiniteComponent: return "no finite component";
    case ViolationKind::TieProbabilityPositive: return "tie probability positive";
    case ViolationKind::NegativeRouting: return "negative routing probability";
    case ViolationKind::RowNotSubstochastic: return "row not substochastic";
    case ViolationKind::NotOpen: return "network not open";
  }
  return "unknown";
}

inline constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

struct Violation {
  ViolationKind kind;
  std::size_t node = kNoIndex;       // 0-based
  std::size_t component = kNoIndex;  // 0-based
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

using ValidationReport = std::vector<Violation>;

/// Renders one violation per line with 1-based indices.
inline std::string describe(const ValidationReport& report) {
  std::string out;
  for (const auto& v : report) {
    out += to_string(v.kind);
    if (v.node != kNoIndex) out += " [node " + std::to_string(v.node + 1);
    if (v.component != kNoIndex) out += ", component " + std::to_string(v.component + 1);
    if (v.node != kNoIndex) out += "]";
    if (!v.message.empty()) out += ": " + v.message;
    out += '\n';
  }
  return out;
}

class ValidationError : public Error {
 public:
  explicit ValidationError(ValidationReport report)
      : Error("invalid network:\n" + describe(report)), report_(std::move(report)) {}

  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

namespace detail {

inline bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

inline std::string parameter_problem(const ServiceDistribution& d) {
  struct V {
    std::string operator()(const Exponential& x) const {
      return positive_finite(x.rate) ? "" : "exponential rate must be > 0";
    }
    std::string operator()(const Deterministic& x) const {
      return positive_finite(x.value) ? "" : "deterministic value must be > 0";
    }
    std::string operator()(const Uniform& x) const {
      if (!(std::isfinite(x.lo) && x.lo >= 0.0)) return "uniform lo must be >= 0";
      if (!(std::isfinite(x.hi) && x.hi > x.lo)) return "uniform hi must exceed lo";
      return "";
    }
    std::string operator()(const Weibull& x) const {
      if (!positive_finite(x.shape)) return "weibull shape must be > 0";
      if (!positive_finite(x.scale)) return "weibull scale must be > 0";
      return "";
    }
    std::string operator()(const Infinite&) const { return ""; }
  };
  return std::visit(V{}, d);
}

// Every (node, component) that can win must be able to reach the exit in
// the expanded chain; otherwise customers circulate forever.
inline std::vector<std::size_t> trapped_nodes(const NetworkSpec& spec) {
  const std::size_t n = spec.num_nodes();
  std::vector<std::vector<std::size_t>> predecessors(n);
  std::vector<bool> exits(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = spec.nodes[i];
    for (std::size_t k = 0; k < node.components.size(); ++k) {
      if (!can_achieve_minimum(node.components, k)) continue;
      double sum = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        sum += node.routing[k][m];
        if (node.routing[k][m] > 0.0) predecessors[m].push_back(i);
      }
      if (sum < 1.0) exits[i] = true;
    }
  }
  std::vector<bool> reach = exits;
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < n; ++i) {
    if (reach[i]) stack.push_back(i);
  }
  while (!stack.empty()) {
    const std::size_t m = stack.back();
    stack.pop_back();
    for (std::size_t p : predecessors[m]) {
      if (!reach[p]) {
        reach[p] = true;
        stack.push_back(p);
      }
    }
  }
  std::vector<std::size_t> trapped;
  for (std::size_t i = 0; i < n; ++i) {
    if (!reach[i]) trapped.push_back(i);
  }
  return trapped;
}

}  // namespace detail

/// Checks every structural invariant of the network. Returns all violations;
/// an empty report means the spec is valid. Openness is only checked once
/// the structural checks pass.
inline ValidationReport validate(const NetworkSpec& spec) {
  ValidationReport report;
  const std::size_t n = spec.num_nodes();
  if (n == 0) {
    report.push_back({ViolationKind::EmptyNetwork, kNoIndex, kNoIndex, "N must be >= 1"});
    return report;
  }
  if (spec.arrival_rates.size() != n) {
    report.push_back({ViolationKind::ArrivalVectorSize, kNoIndex, kNoIndex,
                      "expected " + std::to_string(n) + " arrival rates"});
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double rate = spec.arrival_rates[i];
      if (!(std::isfinite(rate) && rate >= 0.0)) {
        report.push_back({ViolationKind::NegativeArrivalRate, i, kNoIndex,
                          "arrival rate must be finite and >= 0"});
      }
    }
  }

  const std::size_t k_count = spec.num_components();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = spec.nodes[i];
    if (node.components.size() != k_count || k_count == 0) {
      report.push_back({ViolationKind::ComponentCountMismatch, i, kNoIndex,
                        "every node needs the same K >= 1 components"});
    }
    if (node.routing.size() != node.components.size()) {
      report.push_back({ViolationKind::RoutingShape, i, kNoIndex,
                        "one routing row per component required"});
    }
    bool any_finite = false;
    for (std::size_t k = 0; k < node.components.size(); ++k) {
      const auto problem = detail::parameter_problem(node.components[k]);
      if (!problem.empty()) {
        report.push_back({ViolationKind::InvalidParameter, i, k, problem});
      }
      any_finite = any_finite || !is_infinite(node.components[k]);
    }
    if (!any_finite) {
      report.push_back({ViolationKind::NoFiniteComponent, i, kNoIndex,
                        "at least one component must be finite"});
    }
    for (std::size_t k = 0; k < node.components.size(); ++k) {
      const auto* a = std::get_if<Deterministic>(&node.components[k]);
      if (a == nullptr) continue;
      for (std::size_t j = k + 1; j < node.components.size(); ++j) {
        const auto* b = std::get_if<Deterministic>(&node.components[j]);
        if (b != nullptr && a->value == b->value) {
          report.push_back({ViolationKind::TieProbabilityPositive, i, j,
                            "deterministic value coincides with component " +
                                std::to_string(k + 1)});
        }
      }
    }
    for (std::size_t k = 0; k < node.routing.size(); ++k) {
      const auto& row = node.routing[k];
      if (row.size() != n) {
        report.push_back({ViolationKind::RoutingShape, i, k,
                          "routing row must have N entries"});
        continue;
      }
      double sum = 0.0;
      bool negative = false;
      for (double p : row) {
        if (!(std::isfinite(p) && p >= 0.0)) negative = true;
        sum += p;
      }
      if (negative) {
        report.push_back({ViolationKind::NegativeRouting, i, k,
                          "routing probabilities must be finite and >= 0"});
      } else if (sum > 1.0 + 1e-12) {
        report.push_back({ViolationKind::RowNotSubstochastic, i, k,
                          "row sums to " + std::to_string(sum)});
      }
    }
  }
  if (!report.empty()) return report;

  for (std::size_t i : detail::trapped_nodes(spec)) {
    report.push_back({ViolationKind::NotOpen, i, kNoIndex,
                      "customers at this node can never leave the network"});
  }
  return report;
}

/// Throws ValidationError unless the spec is valid.
inline void require_valid(const NetworkSpec& spec) {
  auto report = validate(spec);
  if (!report.empty()) throw ValidationError(std::move(report));
}

/// Two-stage web-service network with deadlines: node 1 (log-in) and node 2
/// (payment) each race an Exp(1) task against a unit deadline. Finishing at
/// node 1 moves on to node 2, finishing at node 2 exits; missing either
/// deadline restarts at node 1. New customers arrive at node 1 at rate 1.
inline NetworkSpec two_node_deadline_network() {
  NetworkSpec spec;
  spec.nodes.push_back(NodeSpec{{Exponential{1.0}, Deterministic{1.0}},
                                {{0.0, 1.0}, {1.0, 0.0}}});
  spec.nodes.push_back(NodeSpec{{Exponential{1.0}, Deterministic{1.0}},
                                {{0.0, 0.0}, {1.0, 0.0}}});
  spec.arrival_rates = {1.0, 0.0};
  return spec;
}

}  // namespace isnet
