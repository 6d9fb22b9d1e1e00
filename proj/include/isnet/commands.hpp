#pragma once

// The CLI commands as plain functions from a scenario to rendered text.

#include <optional>
#include <string>
#include <string_view>

#include "isnet/analytic.hpp"
#include "isnet/config.hpp"
#include "isnet/errors.hpp"
#include "isnet/report.hpp"
#include "isnet/simulate.hpp"
#include "isnet/stats.hpp"

namespace isnet {

enum class Command { Solve, Simulate, Compare, Expand, Baselines };

inline std::optional<Command> parse_command(std::string_view s) {
  if (s == "solve") return Command::Solve;
  if (s == "simulate") return Command::Simulate;
  if (s == "compare") return Command::Compare;
  if (s == "expand") return Command::Expand;
  if (s == "baselines") return Command::Baselines;
  return std::nullopt;
}

/// Process exit statuses of the CLI.
enum ExitStatus : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitValidation = 3,
  kExitOpenness = 4,
  kExitNumerical = 5,
  kExitContract = 6,
};

/// Command-line overrides applied on top of the scenario file.
struct Overrides {
  std::optional<OutputFormat> format;
  std::optional<std::uint64_t> seed;
  std::optional<double> horizon;
  std::optional<double> warmup;
  std::optional<std::size_t> runs;
  bool no_joint = false;
};

/// A horizon override without a warmup override resets warmup to 10% of
/// the new horizon.
inline ScenarioConfig apply(ScenarioConfig cfg, const Overrides& o) {
  if (o.format) cfg.outputs.format = *o.format;
  if (o.seed) cfg.sim.seed = *o.seed;
  if (o.horizon) {
    cfg.sim.horizon = *o.horizon;
    if (!o.warmup) cfg.sim.warmup = 0.1 * *o.horizon;
  }
  if (o.warmup) cfg.sim.warmup = *o.warmup;
  if (o.runs) cfg.runs = *o.runs;
  if (o.no_joint) cfg.outputs.joint = false;
  cfg.sim.record_joint = cfg.outputs.joint;
  if (cfg.runs == 0) throw ContractViolation("--runs must be >= 1");
  check_sim_config(cfg.sim);
  return cfg;
}

namespace detail {

// Column padding leaves blanks at line ends; tables should not carry them.
inline std::string trim_line_ends(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pending = 0;
  for (char c : text) {
    if (c == ' ') {
      ++pending;
      continue;
    }
    if (c != '\n') out.append(pending, ' ');
    pending = 0;
    out.push_back(c);
  }
  return out;
}

inline std::string dispatch(Command cmd, const ScenarioConfig& cfg) {
  const auto& net = cfg.network;
  require_valid(net);
  switch (cmd) {
    case Command::Solve:
      return render_solve(product_form(net), cfg.outputs);
    case Command::Simulate:
      return render_simulate(replicate(net, cfg.sim, cfg.runs), cfg.outputs);
    case Command::Compare:
      return render_compare(compare(net, simulate(net, cfg.sim)), cfg.outputs);
    case Command::Expand: {
      const auto stats = compute_min_stats(net);
      const auto ex = expand_network(net, stats);
      const auto sol = solve_expanded(ex);
      return render_expand(ex, sol, check_expansion(sol, product_form(net, stats)), cfg.outputs);
    }
    case Command::Baselines:
      return render_baselines(baseline_full_insensitivity(net),
                              baseline_service_time_insensitivity(net), cfg.outputs);
  }
  return {};
}

}  // namespace detail

inline std::string run_command(Command cmd, const ScenarioConfig& cfg) {
  auto text = detail::dispatch(cmd, cfg);
  return cfg.outputs.format == OutputFormat::Table ? detail::trim_line_ends(text) : text;
}

}  // namespace isnet
