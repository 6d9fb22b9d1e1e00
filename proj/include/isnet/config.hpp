#pragma once

// Scenario files: an INI-style text format with [network], [sim] and
// [outputs] sections.
//
//   [network]
//   nodes = 2
//   components = 2
//   arrival_rates = 1, 0
//   node.1.service.1 = exp(rate=1)
//   node.1.route.1 = 2: 1
//   node.1.service.2 = det(value=1)
//   node.1.route.2 = 1: 1
//   ...
//
// Node and component indices are 1-based. Laws: exp(rate=r), det(value=v),
// uniform(lo=a, hi=b), weibull(shape=c, scale=s), inf. Arguments may also be
// given positionally. A route is a sparse `target: probability` list or
// `exit`; missing components are padded with `inf`. serialize() emits the
// canonical form, which parse_scenario() reads back to an identical value.

#include <array>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#include "isnet/errors.hpp"
#include "isnet/model.hpp"
#include "isnet/random.hpp"
#include "isnet/simulate.hpp"

namespace isnet {

enum class OutputFormat { Table, Csv, Json };

inline const char* to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Table: return "table";
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
  }
  return "table";
}

inline std::optional<OutputFormat> parse_format(std::string_view s) {
  if (s == "table") return OutputFormat::Table;
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  return std::nullopt;
}

struct OutputOptions {
  OutputFormat format = OutputFormat::Table;
  bool joint = true;
  /// Rows per marginal in table output.
  std::size_t marginals_upto = 10;

  friend bool operator==(const OutputOptions&, const OutputOptions&) = default;
};

struct ScenarioConfig {
  NetworkSpec network;
  SimConfig sim;
  std::size_t runs = 1;
  OutputOptions outputs;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Shortest decimal text that reads back to the same double.
inline std::string format_number(double x) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), end);
}

inline std::string format_distribution(const ServiceDistribution& d) {
  struct V {
    std::string operator()(const Exponential& x) const {
      return "exp(rate=" + format_number(x.rate) + ")";
    }
    std::string operator()(const Deterministic& x) const {
      return "det(value=" + format_number(x.value) + ")";
    }
    std::string operator()(const Uniform& x) const {
      return "uniform(lo=" + format_number(x.lo) + ", hi=" + format_number(x.hi) + ")";
    }
    std::string operator()(const Weibull& x) const {
      return "weibull(shape=" + format_number(x.shape) + ", scale=" + format_number(x.scale) +
             ")";
    }
    std::string operator()(const Infinite&) const { return "inf"; }
  };
  return std::visit(V{}, d);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline double parse_double(std::string_view s, std::size_t line) {
  s = trim(s);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("expected a number, got '" + std::string(s) + "'", line);
  }
  return value;
}

template <class Int>
Int parse_integer(std::string_view s, std::size_t line) {
  s = trim(s);
  Int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("expected a nonnegative integer, got '" + std::string(s) + "'", line);
  }
  return value;
}

inline bool parse_bool(std::string_view s, std::size_t line) {
  s = trim(s);
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError("expected true or false, got '" + std::string(s) + "'", line);
}

// Reads "name(a, b)" / "name(key=a, key=b)" into values ordered as `keys`.
inline std::vector<double> parse_arguments(std::string_view args,
                                           const std::vector<std::string_view>& keys,
                                           std::size_t line) {
  std::vector<std::optional<double>> values(keys.size());
  const auto parts = split(args, ',');
  if (parts.size() != keys.size()) {
    throw ConfigError("expected " + std::to_string(keys.size()) + " arguments", line);
  }
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    std::size_t slot = i;
    std::string_view text = parts[i];
    if (eq != std::string_view::npos) {
      const auto name = trim(parts[i].substr(0, eq));
      slot = keys.size();
      for (std::size_t j = 0; j < keys.size(); ++j) {
        if (keys[j] == name) slot = j;
      }
      if (slot == keys.size()) {
        throw ConfigError("unknown argument '" + std::string(name) + "'", line);
      }
      text = parts[i].substr(eq + 1);
    }
    if (values[slot]) throw ConfigError("argument given twice", line);
    values[slot] = parse_double(text, line);
  }
  std::vector<double> out;
  for (const auto& v : values) out.push_back(*v);
  return out;
}

inline ServiceDistribution parse_distribution(std::string_view text, std::size_t line) {
  text = trim(text);
  if (text == "inf") return Infinite{};
  const auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') {
    throw ConfigError("malformed distribution '" + std::string(text) + "'", line);
  }
  const auto name = trim(text.substr(0, open));
  const auto args = text.substr(open + 1, text.size() - open - 2);
  if (name == "exp") return Exponential{parse_arguments(args, {"rate"}, line)[0]};
  if (name == "det") return Deterministic{parse_arguments(args, {"value"}, line)[0]};
  if (name == "uniform") {
    const auto v = parse_arguments(args, {"lo", "hi"}, line);
    return Uniform{v[0], v[1]};
  }
  if (name == "weibull") {
    const auto v = parse_arguments(args, {"shape", "scale"}, line);
    return Weibull{v[0], v[1]};
  }
  throw ConfigError("unknown distribution '" + std::string(name) + "'", line);
}

struct RawRoute {
  std::vector<std::pair<std::size_t, double>> entries;  // 1-based target
  std::size_t line;
};

inline RawRoute parse_route(std::string_view text, std::size_t line) {
  RawRoute route{{}, line};
  text = trim(text);
  if (text == "exit" || text.empty()) return route;
  for (auto part : split(text, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string_view::npos) {
      throw ConfigError("route entries are 'target: probability'", line);
    }
    route.entries.emplace_back(parse_integer<std::size_t>(part.substr(0, colon), line),
                               parse_double(part.substr(colon + 1), line));
  }
  return route;
}

// "node.<n>.service.<k>" or "node.<n>.route.<k>"
struct NodeKey {
  std::size_t node;
  bool service;
  std::size_t component;
};

inline std::optional<NodeKey> parse_node_key(std::string_view key, std::size_t line) {
  const auto parts = split(key, '.');
  if (parts.size() != 4 || parts[0] != "node" ||
      (parts[2] != "service" && parts[2] != "route")) {
    return std::nullopt;
  }
  NodeKey nk{parse_integer<std::size_t>(parts[1], line), parts[2] == "service",
             parse_integer<std::size_t>(parts[3], line)};
  if (nk.node == 0 || nk.component == 0) throw ConfigError("indices are 1-based", line);
  return nk;
}

}  // namespace detail

/// Parses scenario text. Throws ConfigError on malformed input (including
/// unknown sections or keys) and ValidationError when the network is invalid.
inline ScenarioConfig parse_scenario(std::string_view text) {
  using namespace detail;
  ScenarioConfig cfg;
  std::string section;
  std::map<std::string, std::size_t> seen;

  std::optional<std::size_t> node_count;
  std::optional<std::size_t> component_count;
  std::optional<std::vector<double>> arrivals;
  std::map<std::pair<std::size_t, std::size_t>, std::pair<ServiceDistribution, std::size_t>>
      services;
  std::map<std::pair<std::size_t, std::size_t>, RawRoute> routes;
  std::optional<double> warmup;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    auto line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos
                                                                : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", line_no);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "network" && section != "sim" && section != "outputs") {
        throw ConfigError("unknown section [" + section + "]", line_no);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key = value", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError("key outside of a section", line_no);
    if (!seen.emplace(section + "." + key, line_no).second) {
      throw ConfigError("duplicate key '" + key + "'", line_no);
    }

    if (section == "network") {
      if (key == "nodes") {
        node_count = parse_integer<std::size_t>(value, line_no);
      } else if (key == "components") {
        component_count = parse_integer<std::size_t>(value, line_no);
      } else if (key == "arrival_rates") {
        std::vector<double> rates;
        for (auto part : split(value, ',')) rates.push_back(parse_double(part, line_no));
        arrivals = std::move(rates);
      } else if (auto nk = parse_node_key(key, line_no)) {
        const auto where = std::make_pair(nk->node, nk->component);
        if (nk->service) {
          services.insert_or_assign(where,
                                    std::make_pair(parse_distribution(value, line_no), line_no));
        } else {
          routes.insert_or_assign(where, parse_route(value, line_no));
        }
      } else {
        throw ConfigError("unknown key '" + key + "' in [network]", line_no);
      }
    } else if (section == "sim") {
      if (key == "seed") {
        cfg.sim.seed = parse_integer<std::uint64_t>(value, line_no);
      } else if (key == "generator") {
        cfg.sim.generator_name = std::string(value);
        if (value != kGeneratorName) {
          throw ConfigError("unsupported generator '" + std::string(value) + "'", line_no);
        }
      } else if (key == "horizon") {
        cfg.sim.horizon = parse_double(value, line_no);
      } else if (key == "warmup") {
        warmup = parse_double(value, line_no);
      } else if (key == "runs") {
        cfg.runs = parse_integer<std::size_t>(value, line_no);
      } else {
        throw ConfigError("unknown key '" + key + "' in [sim]", line_no);
      }
    } else {
      if (key == "format") {
        const auto f = parse_format(value);
        if (!f) throw ConfigError("format must be table, csv or json", line_no);
        cfg.outputs.format = *f;
      } else if (key == "joint") {
        cfg.outputs.joint = parse_bool(value, line_no);
      } else if (key == "marginals_upto") {
        cfg.outputs.marginals_upto = parse_integer<std::size_t>(value, line_no);
      } else {
        throw ConfigError("unknown key '" + key + "' in [outputs]", line_no);
      }
    }
  }

  if (!node_count || *node_count == 0) throw ConfigError("[network] needs nodes >= 1");
  const std::size_t n = *node_count;
  std::size_t k = component_count.value_or(0);
  for (const auto& [where, entry] : services) {
    if (where.first > n) throw ConfigError("node index beyond nodes", entry.second);
    if (component_count && where.second > k) {
      throw ConfigError("component index beyond components", entry.second);
    }
    k = std::max(k, where.second);
  }
  for (const auto& [where, route] : routes) {
    if (where.first > n) throw ConfigError("node index beyond nodes", route.line);
    if (where.second > k) throw ConfigError("route for an undeclared component", route.line);
    for (const auto& [target, prob] : route.entries) {
      if (target == 0 || target > n) throw ConfigError("route target out of range", route.line);
    }
  }
  if (k == 0) throw ConfigError("[network] declares no service components");
  if (!arrivals) throw ConfigError("[network] needs arrival_rates");

  cfg.network.arrival_rates = *arrivals;
  for (std::size_t i = 1; i <= n; ++i) {
    NodeSpec node;
    for (std::size_t c = 1; c <= k; ++c) {
      const auto s = services.find({i, c});
      node.components.push_back(s == services.end() ? ServiceDistribution{Infinite{}}
                                                    : s->second.first);
      std::vector<double> row(n, 0.0);
      if (const auto r = routes.find({i, c}); r != routes.end()) {
        for (const auto& [target, prob] : r->second.entries) {
          if (row[target - 1] != 0.0) throw ConfigError("route target repeated", r->second.line);
          row[target - 1] = prob;
        }
      }
      node.routing.push_back(std::move(row));
    }
    cfg.network.nodes.push_back(std::move(node));
  }

  cfg.sim.warmup = warmup.value_or(0.1 * cfg.sim.horizon);
  cfg.sim.record_joint = cfg.outputs.joint;
  if (cfg.runs == 0) throw ConfigError("runs must be >= 1");
  if (!(cfg.sim.horizon > cfg.sim.warmup && cfg.sim.warmup >= 0.0)) {
    throw ConfigError("[sim] needs horizon > warmup >= 0");
  }
  require_valid(cfg.network);
  return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

/// Canonical text of a scenario.
inline std::string serialize(const ScenarioConfig& cfg) {
  std::ostringstream out;
  const auto& net = cfg.network;
  out << "[network]\n";
  out << "nodes = " << net.num_nodes() << '\n';
  out << "components = " << net.num_components() << '\n';
  out << "arrival_rates = ";
  for (std::size_t i = 0; i < net.arrival_rates.size(); ++i) {
    out << (i ? ", " : "") << format_number(net.arrival_rates[i]);
  }
  out << '\n';
  for (std::size_t i = 0; i < net.num_nodes(); ++i) {
    const auto& node = net.nodes[i];
    for (std::size_t k = 0; k < node.components.size(); ++k) {
      out << "node." << i + 1 << ".service." << k + 1 << " = "
          << format_distribution(node.components[k]) << '\n';
      out << "node." << i + 1 << ".route." << k + 1 << " = ";
      bool any = false;
      for (std::size_t m = 0; m < node.routing[k].size(); ++m) {
        if (node.routing[k][m] == 0.0) continue;
        out << (any ? ", " : "") << m + 1 << ": " << format_number(node.routing[k][m]);
        any = true;
      }
      out << (any ? "" : "exit") << '\n';
    }
  }
  out << "\n[sim]\n";
  out << "seed = " << cfg.sim.seed << '\n';
  out << "generator = " << cfg.sim.generator_name << '\n';
  out << "horizon = " << format_number(cfg.sim.horizon) << '\n';
  out << "warmup = " << format_number(cfg.sim.warmup) << '\n';
  out << "runs = " << cfg.runs << '\n';
  out << "\n[outputs]\n";
  out << "format = " << to_string(cfg.outputs.format) << '\n';
  out << "joint = " << (cfg.outputs.joint ? "true" : "false") << '\n';
  out << "marginals_upto = " << cfg.outputs.marginals_upto << '\n';
  return out.str();
}

}  // namespace isnet
