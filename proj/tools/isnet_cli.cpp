// isnet: equilibrium analysis and simulation of deadline-routed
// infinite-server networks.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "isnet/commands.hpp"

int main(int argc, char** argv) {
  using namespace isnet;

  CLI::App app{"Exact equilibrium and simulation of infinite-server networks with "
               "competing service times"};
  app.require_subcommand(1);

  std::string config_path;
  std::string format;
  std::string out_path;
  Overrides overrides;
  std::uint64_t seed = 0;
  double horizon = 0.0;
  double warmup = 0.0;
  std::size_t runs = 0;

  const std::pair<const char*, const char*> commands[] = {
      {"solve", "Exact occupancy means and Poisson marginals"},
      {"simulate", "Event-driven simulation of the original network"},
      {"compare", "Simulation versus exact solution and both baselines"},
      {"expand", "Equivalent Markov-routed network and its cross-check"},
      {"baselines", "Naive Jackson-network approximations"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    sub->add_option("--out", out_path, "Write output to this file instead of stdout");
    if (std::string(name) == "simulate" || std::string(name) == "compare") {
      sub->add_option("--seed", seed, "Base seed");
      sub->add_option("--horizon", horizon, "Simulated time horizon");
      sub->add_option("--warmup", warmup, "Discarded initial period");
      sub->add_flag("--no-joint", overrides.no_joint, "Skip the joint histogram");
    }
    if (std::string(name) == "simulate") {
      sub->add_option("--runs", runs, "Number of replications");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const auto* chosen = app.get_subcommands().front();
  for (const auto* opt : {"--seed", "--horizon", "--warmup", "--runs"}) {
    const auto* o = chosen->get_option_no_throw(opt);
    if (o == nullptr || o->count() == 0) continue;
    const std::string which = opt;
    if (which == "--seed") overrides.seed = seed;
    if (which == "--horizon") overrides.horizon = horizon;
    if (which == "--warmup") overrides.warmup = warmup;
    if (which == "--runs") overrides.runs = runs;
  }
  if (!format.empty()) overrides.format = parse_format(format);

  try {
    const auto cfg = apply(load_scenario(config_path), overrides);
    const auto text = run_command(*parse_command(chosen->get_name()), cfg);
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return kExitConfig;
      }
      out << text;
    }
  } catch (const ValidationError& e) {
    const auto& report = e.report();
    const bool only_openness = std::all_of(report.begin(), report.end(), [](const auto& v) {
      return v.kind == ViolationKind::NotOpen;
    });
    std::cerr << (only_openness ? "openness error:\n" : "validation failed:\n")
              << describe(report);
    return only_openness ? kExitOpenness : kExitValidation;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const OpennessError& e) {
    std::cerr << "openness error: " << e.what() << '\n';
    return kExitOpenness;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << '\n';
    return kExitContract;
  }
  return kExitOk;
}
