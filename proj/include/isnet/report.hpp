#pragma once

// Text renderings of the analysis results in the three CLI output formats.
//
// CSV files start with a version line `# isnet-csv v1 <kind>` followed by a
// header row. Kinds and columns:
//   solve              node,state,probability
//   simulate-joint     x1,...,xN,probability
//   simulate-marginal  node,state,probability
//   simulate-pooled    node,pooled_mean,standard_error
//   compare            node,simulated,exact,full_insensitivity,
//                      service_time_insensitivity,tv_distance,product_form_sup
//   expand             from_node,from_component,to_node,to_component,probability
//   baselines          method,node,rho,rate
// Nodes, components and states x are written 1-based, 1-based and 0-based.

#include <cstddef>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "isnet/analytic.hpp"
#include "isnet/config.hpp"
#include "isnet/simulate.hpp"
#include "isnet/stats.hpp"

namespace isnet {

inline constexpr std::string_view kCsvVersion = "isnet-csv v1";

namespace detail {

inline std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

inline std::string padded_cell(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

inline std::string csv_preamble(std::string_view kind, std::string_view header) {
  return "# " + std::string(kCsvVersion) + " " + std::string(kind) + "\n" +
         std::string(header) + "\n";
}

inline nlohmann::json pmf_json(const Pmf& pmf) {
  auto j = nlohmann::json::array();
  for (double p : pmf) j.push_back(p);
  return j;
}

inline std::string pair_label(std::size_t n, std::size_t k) {
  return "(" + std::to_string(n + 1) + "," + std::to_string(k + 1) + ")";
}

}  // namespace detail

inline std::string render_solve(const ProductForm& pf, const OutputOptions& out) {
  using detail::fixed;
  const std::size_t n_nodes = pf.num_nodes();
  if (out.format == OutputFormat::Json) {
    nlohmann::json j;
    j["rho"] = pf.rho();
    j["alpha"] = pf.traffic().alpha;
    j["min_stats"] = {{"p", pf.stats().p},
                      {"cond_mean", pf.stats().cond_mean},
                      {"mean_min", pf.stats().mean_min}};
    auto marginals = nlohmann::json::array();
    for (std::size_t n = 0; n < n_nodes; ++n) {
      marginals.push_back({{"node", n + 1},
                           {"support_limit", poisson_support_limit(pf.rho()[n])},
                           {"pmf", detail::pmf_json(pf.marginal_table(n))}});
    }
    j["marginals"] = marginals;
    return j.dump(2) + "\n";
  }
  if (out.format == OutputFormat::Csv) {
    std::string s = detail::csv_preamble("solve", "node,state,probability");
    for (std::size_t n = 0; n < n_nodes; ++n) {
      const auto pmf = pf.marginal_table(n);
      for (std::size_t x = 0; x < pmf.size(); ++x) {
        s += std::to_string(n + 1) + "," + std::to_string(x) + "," + format_number(pmf[x]) + "\n";
      }
    }
    return s;
  }
  std::string s = "exact equilibrium: X_n ~ Poisson(rho_n), independent across nodes\n";
  s += "rho =";
  for (std::size_t n = 0; n < n_nodes; ++n) s += (n ? ", " : " ") + fixed(pf.rho()[n], 3);
  s += "\n\n";
  s += detail::padded_cell("node", 6) + detail::padded_cell("rho", 12) + "flows by component\n";
  for (std::size_t n = 0; n < n_nodes; ++n) {
    s += detail::padded_cell(std::to_string(n + 1), 6) +
         detail::padded_cell(fixed(pf.rho()[n], 6), 12);
    for (double a : pf.traffic().alpha[n]) s += fixed(a, 6) + " ";
    s += "\n";
  }
  s += "\nmarginal pmf\n" + detail::padded_cell("x", 6);
  for (std::size_t n = 0; n < n_nodes; ++n) {
    s += detail::padded_cell("node " + std::to_string(n + 1), 12);
  }
  s += "\n";
  for (std::size_t x = 0; x < out.marginals_upto; ++x) {
    s += detail::padded_cell(std::to_string(x), 6);
    for (std::size_t n = 0; n < n_nodes; ++n) {
      s += detail::padded_cell(fixed(pf.marginal(n, x), 6), 12);
    }
    s += "\n";
  }
  return s;
}

inline nlohmann::json to_json(const SimResult& r) {
  nlohmann::json j;
  j["run"] = r.run;
  j["seed"] = r.config.seed;
  j["generator"] = r.config.generator_name;
  j["horizon"] = r.config.horizon;
  j["warmup"] = r.config.warmup;
  j["effective_duration"] = r.effective_duration;
  j["means"] = r.means;
  auto marginals = nlohmann::json::array();
  for (std::size_t n = 0; n < r.marginal_weights.size(); ++n) {
    marginals.push_back(detail::pmf_json(empirical_marginal(r, n)));
  }
  j["marginals"] = marginals;
  if (r.config.record_joint) {
    auto joint = nlohmann::json::array();
    for (const auto& [state, w] : r.joint_weights) {
      joint.push_back({{"state", state}, {"probability", w / r.effective_duration}});
    }
    j["joint"] = joint;
  } else {
    j["joint"] = nullptr;
  }
  j["counts"] = {{"external_arrivals", r.counts.external_arrivals},
                 {"arrivals", r.counts.arrivals},
                 {"departures", r.counts.departures},
                 {"in_service_at_horizon", r.counts.in_service_at_horizon},
                 {"ties", r.counts.ties}};
  return j;
}

inline std::string render_simulate(const ReplicationSummary& sum, const OutputOptions& out) {
  using detail::fixed;
  const auto& first = sum.runs.front();
  const std::size_t n_nodes = first.means.size();
  if (out.format == OutputFormat::Json) {
    nlohmann::json j;
    auto runs = nlohmann::json::array();
    for (const auto& r : sum.runs) runs.push_back(to_json(r));
    j["runs"] = runs;
    j["pooled_means"] = sum.pooled_means;
    j["standard_errors"] = sum.standard_errors;
    return j.dump(2) + "\n";
  }
  if (out.format == OutputFormat::Csv) {
    if (sum.runs.size() > 1) {
      std::string s = detail::csv_preamble("simulate-pooled", "node,pooled_mean,standard_error");
      for (std::size_t n = 0; n < n_nodes; ++n) {
        s += std::to_string(n + 1) + "," + format_number(sum.pooled_means[n]) + "," +
             format_number(sum.standard_errors[n]) + "\n";
      }
      return s;
    }
    if (first.config.record_joint) {
      std::string header;
      for (std::size_t n = 0; n < n_nodes; ++n) header += "x" + std::to_string(n + 1) + ",";
      std::string s = detail::csv_preamble("simulate-joint", header + "probability");
      for (const auto& [state, w] : first.joint_weights) {
        for (auto x : state) s += std::to_string(x) + ",";
        s += format_number(w / first.effective_duration) + "\n";
      }
      return s;
    }
    std::string s = detail::csv_preamble("simulate-marginal", "node,state,probability");
    for (std::size_t n = 0; n < n_nodes; ++n) {
      const auto pmf = empirical_marginal(first, n);
      for (std::size_t x = 0; x < pmf.size(); ++x) {
        s += std::to_string(n + 1) + "," + std::to_string(x) + "," + format_number(pmf[x]) + "\n";
      }
    }
    return s;
  }
  std::string s = "simulation: seed " + std::to_string(first.config.seed) + ", horizon " +
                  format_number(first.config.horizon) + ", warmup " +
                  format_number(first.config.warmup) + ", runs " +
                  std::to_string(sum.runs.size()) + "\n\n";
  s += detail::padded_cell("node", 6) + detail::padded_cell("mean", 12) +
       detail::padded_cell("std.err", 12) + "arrivals    departures by component\n";
  for (std::size_t n = 0; n < n_nodes; ++n) {
    s += detail::padded_cell(std::to_string(n + 1), 6) +
         detail::padded_cell(fixed(sum.pooled_means[n], 4), 12) +
         detail::padded_cell(sum.runs.size() > 1 ? fixed(sum.standard_errors[n], 4) : "-", 12) +
         detail::padded_cell(std::to_string(first.counts.arrivals[n]), 12);
    for (auto d : first.counts.departures[n]) s += std::to_string(d) + " ";
    s += "\n";
  }
  s += "\nempirical marginal pmf (run 0)\n" + detail::padded_cell("x", 6);
  for (std::size_t n = 0; n < n_nodes; ++n) {
    s += detail::padded_cell("node " + std::to_string(n + 1), 12);
  }
  s += "\n";
  for (std::size_t x = 0; x < out.marginals_upto; ++x) {
    s += detail::padded_cell(std::to_string(x), 6);
    for (std::size_t n = 0; n < n_nodes; ++n) {
      const auto pmf = empirical_marginal(first, n);
      s += detail::padded_cell(fixed(x < pmf.size() ? pmf[x] : 0.0, 6), 12);
    }
    s += "\n";
  }
  if (first.counts.ties > 0) s += "\nties broken by component index: " +
                                  std::to_string(first.counts.ties) + "\n";
  return s;
}

inline std::string render_compare(const ComparisonReport& rep, const OutputOptions& out) {
  using detail::fixed;
  const std::size_t n_nodes = rep.mean_table.size();
  if (out.format == OutputFormat::Json) {
    nlohmann::json j;
    auto table = nlohmann::json::array();
    for (std::size_t n = 0; n < n_nodes; ++n) {
      const auto& row = rep.mean_table[n];
      table.push_back({{"node", n + 1},
                       {"simulated", row.simulated},
                       {"exact", row.exact},
                       {"full_insensitivity", row.full_insensitivity},
                       {"service_time_insensitivity", row.service_time_insensitivity}});
    }
    j["mean_table"] = table;
    j["marginal_distance"] = rep.marginal_distance;
    j["product_form_sup"] =
        rep.product_form_sup ? nlohmann::json(*rep.product_form_sup) : nlohmann::json(nullptr);
    j["sample_info"] = {{"horizon", rep.sample_info.horizon},
                        {"warmup", rep.sample_info.warmup},
                        {"effective_duration", rep.sample_info.effective_duration},
                        {"seed", rep.sample_info.seed},
                        {"run", rep.sample_info.run}};
    return j.dump(2) + "\n";
  }
  if (out.format == OutputFormat::Csv) {
    std::string s = detail::csv_preamble(
        "compare",
        "node,simulated,exact,full_insensitivity,service_time_insensitivity,tv_distance,"
        "product_form_sup");
    for (std::size_t n = 0; n < n_nodes; ++n) {
      const auto& row = rep.mean_table[n];
      s += std::to_string(n + 1) + "," + format_number(row.simulated) + "," +
           format_number(row.exact) + "," + format_number(row.full_insensitivity) + "," +
           format_number(row.service_time_insensitivity) + "," +
           format_number(rep.marginal_distance[n]) + "," +
           (rep.product_form_sup ? format_number(*rep.product_form_sup) : "") + "\n";
    }
    return s;
  }
  std::string s = "average number of customers per node\n";
  s += detail::padded_cell("", 46);
  for (std::size_t n = 0; n < n_nodes; ++n) {
    s += detail::padded_cell("node " + std::to_string(n + 1), 10);
  }
  s += "\n";
  auto row = [&](const char* label, auto field) {
    std::string line = detail::padded_cell(label, 46);
    for (const auto& r : rep.mean_table) line += detail::padded_cell(fixed(field(r), 3), 10);
    return line + "\n";
  };
  s += row("Simulated", [](const MeanRow& r) { return r.simulated; });
  s += row("Exact", [](const MeanRow& r) { return r.exact; });
  s += row("Assuming Full Insensitivity", [](const MeanRow& r) { return r.full_insensitivity; });
  s += row("Assuming Insensitivity of the Service Times",
           [](const MeanRow& r) { return r.service_time_insensitivity; });
  s += "\ntotal variation to Poisson(rho):";
  for (double d : rep.marginal_distance) s += " " + fixed(d, 5);
  s += "\n";
  if (rep.product_form_sup) {
    s += "sup |joint - product of marginals| = " + fixed(*rep.product_form_sup, 5) + "\n";
  }
  s += "horizon " + format_number(rep.sample_info.horizon) + ", warmup " +
       format_number(rep.sample_info.warmup) + ", seed " + std::to_string(rep.sample_info.seed) +
       "\n";
  return s;
}

/// Supernode aggregates of the expanded solve against the direct solve.
struct ExpansionCheck {
  std::vector<double> aggregate_rho;
  std::vector<double> direct_rho;
  double max_deviation = 0.0;
  bool consistent() const { return max_deviation <= 1e-9; }
};

inline ExpansionCheck check_expansion(const ExpandedSolution& sol, const ProductForm& pf) {
  ExpansionCheck c{sol.rho, pf.rho(), 0.0};
  for (std::size_t n = 0; n < sol.rho.size(); ++n) {
    c.max_deviation = std::max(c.max_deviation, std::abs(sol.rho[n] - pf.rho()[n]));
  }
  return c;
}

inline std::string render_expand(const ExpandedNetwork& ex, const ExpandedSolution& sol,
                                 const ExpansionCheck& check, const OutputOptions& out) {
  using detail::fixed;
  const std::size_t size = ex.nodes.size();
  if (out.format == OutputFormat::Json) {
    nlohmann::json j;
    auto nodes = nlohmann::json::array();
    for (std::size_t i = 0; i < size; ++i) {
      const auto& nd = ex.nodes[i];
      nodes.push_back({{"node", nd.node + 1},
                       {"component", nd.component + 1},
                       {"supernode", ex.supernode[i] + 1},
                       {"external_rate", nd.external_rate},
                       {"mean_service", nd.mean_service},
                       {"service_rate", nd.service_rate()},
                       {"exit_probability", ex.exit_probability(i)}});
    }
    j["nodes"] = nodes;
    auto routing = nlohmann::json::array();
    for (std::size_t i = 0; i < size; ++i) {
      std::vector<double> row;
      for (std::size_t c = 0; c < size; ++c) row.push_back(ex.routing(i, c));
      routing.push_back(row);
    }
    j["routing"] = routing;
    j["rho_component"] = sol.rho_component;
    j["aggregate_rho"] = check.aggregate_rho;
    j["direct_rho"] = check.direct_rho;
    j["max_deviation"] = check.max_deviation;
    j["consistent"] = check.consistent();
    return j.dump(2) + "\n";
  }
  if (out.format == OutputFormat::Csv) {
    std::string s = detail::csv_preamble(
        "expand", "from_node,from_component,to_node,to_component,probability");
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t c = 0; c < size; ++c) {
        if (ex.routing(i, c) == 0.0) continue;
        s += std::to_string(ex.nodes[i].node + 1) + "," +
             std::to_string(ex.nodes[i].component + 1) + "," +
             std::to_string(ex.nodes[c].node + 1) + "," +
             std::to_string(ex.nodes[c].component + 1) + "," + format_number(ex.routing(i, c)) +
             "\n";
      }
    }
    return s;
  }
  std::string s = "expanded network: " + std::to_string(size) + " nodes in " +
                  std::to_string(ex.original_nodes) + " supernodes\n\n";
  for (std::size_t i = 0; i < size; ++i) {
    const auto& nd = ex.nodes[i];
    s += "node " + detail::pair_label(nd.node, nd.component) + "  external rate " +
         fixed(nd.external_rate, 6) + "  mean service " + fixed(nd.mean_service, 6) +
         "  rho " + fixed(sol.rho_component[nd.node][nd.component], 6) + "\n";
    for (std::size_t c = 0; c < size; ++c) {
      if (ex.routing(i, c) == 0.0) continue;
      s += "    -> " + detail::pair_label(ex.nodes[c].node, ex.nodes[c].component) + "  " +
           fixed(ex.routing(i, c), 6) + "\n";
    }
    s += "    -> exit   " + fixed(ex.exit_probability(i), 6) + "\n";
  }
  s += "\nsupernode rho (expanded) vs rho (direct):\n";
  for (std::size_t n = 0; n < check.aggregate_rho.size(); ++n) {
    s += "  node " + std::to_string(n + 1) + ": " + fixed(check.aggregate_rho[n], 9) + " vs " +
         fixed(check.direct_rho[n], 9) + "\n";
  }
  char dev[32];
  std::snprintf(dev, sizeof dev, "%.2e", check.max_deviation);
  s += std::string("equivalence check: ") + (check.consistent() ? "OK" : "FAILED") +
       " (max deviation " + dev + ")\n";
  return s;
}

inline std::string render_baselines(const BaselineResult& full, const BaselineResult& sti,
                                    const OutputOptions& out) {
  using detail::fixed;
  const std::size_t n_nodes = full.rho.size();
  auto as_json = [&](const BaselineResult& b) {
    nlohmann::json j;
    j["method"] = to_string(b.method);
    j["rho"] = b.rho;
    auto routing = nlohmann::json::array();
    for (std::size_t n = 0; n < n_nodes; ++n) {
      std::vector<double> row;
      for (std::size_t m = 0; m < n_nodes; ++m) row.push_back(b.routing_used(n, m));
      routing.push_back(row);
    }
    j["routing_used"] = routing;
    j["rates_used"] = b.rates_used;
    return j;
  };
  if (out.format == OutputFormat::Json) {
    return nlohmann::json::array({as_json(full), as_json(sti)}).dump(2) + "\n";
  }
  if (out.format == OutputFormat::Csv) {
    std::string s = detail::csv_preamble("baselines", "method,node,rho,rate");
    for (const auto* b : {&full, &sti}) {
      for (std::size_t n = 0; n < n_nodes; ++n) {
        s += std::string(to_string(b->method)) + "," + std::to_string(n + 1) + "," +
             format_number(b->rho[n]) + "," + format_number(b->rates_used[n]) + "\n";
      }
    }
    return s;
  }
  std::string s;
  for (const auto* b : {&full, &sti}) {
    s += b == &full ? "Assuming Full Insensitivity\n"
                    : "Assuming Insensitivity of the Service Times\n";
    s += "  rho =";
    for (std::size_t n = 0; n < n_nodes; ++n) s += (n ? ", " : " ") + fixed(b->rho[n], 3);
    s += "\n  service rate =";
    for (std::size_t n = 0; n < n_nodes; ++n) s += (n ? ", " : " ") + fixed(b->rates_used[n], 6);
    s += "\n  routing:\n";
    for (std::size_t n = 0; n < n_nodes; ++n) {
      s += "   ";
      for (std::size_t m = 0; m < n_nodes; ++m) s += " " + fixed(b->routing_used(n, m), 6);
      s += "\n";
    }
  }
  return s;
}

struct CsvTable {
  std::string kind;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a CSV produced by the renderers above. Throws ConfigError when the
/// version line or the column count does not match.
inline CsvTable read_csv(std::string_view text) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  const std::string prefix = "# " + std::string(kCsvVersion) + " ";
  if (lines.size() < 2 || lines[0].rfind(prefix, 0) != 0) {
    throw ConfigError("missing '" + prefix + "<kind>' version line");
  }
  auto cells = [](const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
  };
  CsvTable t{lines[0].substr(prefix.size()), cells(lines[1]), {}};
  for (std::size_t i = 2; i < lines.size(); ++i) {
    auto row = cells(lines[i]);
    if (row.size() != t.header.size()) throw ConfigError("CSV row has wrong column count", i + 1);
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace isnet
