#pragma once

// Event-driven simulation of the original network. Each customer's route
// after service depends on which competing component finished first, so
// the routing is not Markov in the node state.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <vector>

#include "isnet/distributions.hpp"
#include "isnet/errors.hpp"
#include "isnet/model.hpp"
#include "isnet/random.hpp"

namespace isnet {

struct SimConfig {
  std::uint64_t seed = 1;
  std::string generator_name{kGeneratorName};
  double horizon = 1e4;
  /// Statistics are collected over [warmup, horizon].
  double warmup = 1e3;
  bool record_joint = true;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

inline void check_sim_config(const SimConfig& cfg) {
  if (cfg.generator_name != kGeneratorName) {
    throw ContractViolation("unsupported generator '" + cfg.generator_name + "'; expected '" +
                            std::string(kGeneratorName) + "'");
  }
  if (!(std::isfinite(cfg.horizon) && cfg.warmup >= 0.0 && cfg.horizon > cfg.warmup)) {
    throw ContractViolation("simulation needs horizon > warmup >= 0");
  }
}

using OccupancyVector = std::vector<std::uint32_t>;

struct EventCounts {
  std::vector<std::uint64_t> external_arrivals;
  /// External plus routed arrivals per node.
  std::vector<std::uint64_t> arrivals;
  /// departures[n][k]: services at node n won by component k.
  std::vector<std::vector<std::uint64_t>> departures;
  std::vector<std::uint64_t> in_service_at_horizon;
  /// Samples where two component times were exactly equal.
  std::uint64_t ties = 0;

  std::uint64_t departures_from(std::size_t n) const {
    std::uint64_t s = 0;
    for (auto d : departures[n]) s += d;
    return s;
  }
};

struct SimResult {
  /// Time spent in each visited occupancy vector (empty unless recorded).
  std::map<OccupancyVector, double> joint_weights;
  /// marginal_weights[n][x]: time with x customers at node n.
  std::vector<std::vector<double>> marginal_weights;
  std::vector<double> means;
  EventCounts counts;
  double effective_duration = 0.0;
  SimConfig config;
  std::uint64_t run = 0;
};

namespace detail {

struct SimEvent {
  double time;
  std::uint64_t sequence;
  bool departure;
  std::size_t node;
  std::size_t component;

  bool operator>(const SimEvent& o) const {
    return time != o.time ? time > o.time : sequence > o.sequence;
  }
};

class Simulator {
 public:
  Simulator(const NetworkSpec& spec, const SimConfig& cfg, std::uint64_t run)
      : spec_(spec), cfg_(cfg), rng_(cfg.seed, run), state_(spec.num_nodes(), 0) {
    const std::size_t n = spec.num_nodes();
    result_.config = cfg;
    result_.run = run;
    result_.marginal_weights.assign(n, {});
    result_.counts.external_arrivals.assign(n, 0);
    result_.counts.arrivals.assign(n, 0);
    result_.counts.departures.assign(n, std::vector<std::uint64_t>(spec.num_components(), 0));
  }

  SimResult run() {
    for (std::size_t n = 0; n < spec_.num_nodes(); ++n) schedule_external(n, 0.0);
    double now = 0.0;
    while (!events_.empty() && events_.top().time <= cfg_.horizon) {
      const SimEvent ev = events_.top();
      events_.pop();
      accumulate(now, ev.time);
      now = ev.time;
      if (ev.departure) {
        depart(ev);
      } else {
        ++result_.counts.external_arrivals[ev.node];
        arrive(ev.node, now);
        schedule_external(ev.node, now);
      }
    }
    accumulate(now, cfg_.horizon);
    finish();
    return std::move(result_);
  }

 private:
  void push(double time, bool departure, std::size_t node, std::size_t component) {
    events_.push({time, sequence_++, departure, node, component});
  }

  void schedule_external(std::size_t n, double now) {
    const double rate = spec_.arrival_rates[n];
    if (rate > 0.0) push(now - std::log1p(-rng_.uniform()) / rate, false, n, 0);
  }

  void arrive(std::size_t n, double now) {
    ++state_[n];
    ++result_.counts.arrivals[n];
    const auto& comps = spec_.nodes[n].components;
    double best = std::numeric_limits<double>::infinity();
    std::size_t winner = comps.size();
    for (std::size_t k = 0; k < comps.size(); ++k) {
      if (is_infinite(comps[k])) continue;
      const double t = sample(comps[k], rng_);
      if (t < best) {
        best = t;
        winner = k;
      } else if (t == best) {
        ++result_.counts.ties;
      }
    }
    push(now + best, true, n, winner);
  }

  void depart(const SimEvent& ev) {
    --state_[ev.node];
    ++result_.counts.departures[ev.node][ev.component];
    const auto& row = spec_.nodes[ev.node].routing[ev.component];
    const double u = rng_.uniform();
    double cumulative = 0.0;
    for (std::size_t m = 0; m < row.size(); ++m) {
      cumulative += row[m];
      if (u < cumulative) {
        arrive(m, ev.time);
        return;
      }
    }
  }

  void accumulate(double from, double to) {
    const double lo = std::max(from, cfg_.warmup);
    const double hi = std::min(to, cfg_.horizon);
    if (!(hi > lo)) return;
    const double dt = hi - lo;
    for (std::size_t n = 0; n < state_.size(); ++n) {
      auto& w = result_.marginal_weights[n];
      if (w.size() <= state_[n]) w.resize(state_[n] + 1, 0.0);
      w[state_[n]] += dt;
    }
    if (cfg_.record_joint) result_.joint_weights[state_] += dt;
  }

  void finish() {
    result_.effective_duration = cfg_.horizon - cfg_.warmup;
    result_.counts.in_service_at_horizon.assign(state_.begin(), state_.end());
    for (const auto& w : result_.marginal_weights) {
      double s = 0.0;
      for (std::size_t x = 0; x < w.size(); ++x) s += static_cast<double>(x) * w[x];
      result_.means.push_back(s / result_.effective_duration);
    }
  }

  const NetworkSpec& spec_;
  const SimConfig& cfg_;
  RandomStream rng_;
  OccupancyVector state_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, std::greater<>> events_;
  std::uint64_t sequence_ = 0;
  SimResult result_;
};

}  // namespace detail

/// Simulates replication `run` of the network; equal inputs give equal
/// results.
inline SimResult simulate(const NetworkSpec& spec, const SimConfig& cfg, std::uint64_t run = 0) {
  require_valid(spec);
  check_sim_config(cfg);
  return detail::Simulator(spec, cfg, run).run();
}

struct ReplicationSummary {
  std::vector<SimResult> runs;
  std::vector<double> pooled_means;
  /// Across-run standard error of pooled_means; 0 for a single run.
  std::vector<double> standard_errors;
};

/// Runs replications 0..runs-1 (stream r derived from (seed, r)) and pools
/// their per-node means.
inline ReplicationSummary replicate(const NetworkSpec& spec, const SimConfig& cfg,
                                    std::size_t runs) {
  if (runs == 0) throw ContractViolation("replicate needs runs >= 1");
  ReplicationSummary out;
  for (std::size_t r = 0; r < runs; ++r) out.runs.push_back(simulate(spec, cfg, r));
  const std::size_t n_nodes = spec.num_nodes();
  const double count = static_cast<double>(runs);
  for (std::size_t n = 0; n < n_nodes; ++n) {
    double sum = 0.0;
    for (const auto& r : out.runs) sum += r.means[n];
    const double avg = sum / count;
    double ss = 0.0;
    for (const auto& r : out.runs) ss += (r.means[n] - avg) * (r.means[n] - avg);
    out.pooled_means.push_back(avg);
    out.standard_errors.push_back(runs > 1 ? std::sqrt(ss / (count - 1.0) / count) : 0.0);
  }
  return out;
}

}  // namespace isnet
