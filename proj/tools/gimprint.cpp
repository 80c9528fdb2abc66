// gimprint: scenario runner and invariant checker.
//
//   gimprint run <scenario> [--config FILE] [--threads N] [--<key> <value> ...]
//   gimprint verify [--threads N]
//   gimprint print-config <scenario>
//
// Exit codes: 0 success, 1 unexpected error, 2 invalid input, 3 adiabaticity
// failure, 4 internal-consistency failure.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gimprint/config.hpp"
#include "gimprint/core.hpp"
#include "gimprint/invariants.hpp"
#include "gimprint/parallel.hpp"
#include "gimprint/runner.hpp"

namespace {

using gimprint::config::ScenarioConfig;

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw gimprint::ValidationError("cannot read config file " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

/// Applies "--key value" and "--key=value" overrides left over by CLI11.
void apply_overrides(ScenarioConfig& cfg, const std::vector<std::string>& extras) {
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const std::string& tok = extras[i];
    if (!tok.starts_with("--"))
      throw gimprint::ValidationError("unexpected argument '" + tok + "' (overrides look like --key value)");
    if (const auto eq = tok.find('='); eq != std::string::npos) {
      cfg.set(tok.substr(0, eq), tok.substr(eq + 1));
      continue;
    }
    if (i + 1 >= extras.size()) throw gimprint::ValidationError("missing value for " + tok);
    cfg.set(tok, extras[++i]);
  }
}

int run_command(const std::string& scenario, const std::string& config_path,
                const std::vector<std::string>& extras) {
  ScenarioConfig cfg = ScenarioConfig::preset(scenario);
  if (!config_path.empty()) {
    cfg = ScenarioConfig::parse(read_file(config_path));
    if (cfg.scenario() != scenario)
      throw gimprint::ValidationError("config file is for scenario '" + cfg.scenario() + "', not '" + scenario + "'");
  }
  apply_overrides(cfg, extras);
  const gimprint::runner::RunResult result = gimprint::runner::run(cfg);
  const std::filesystem::path dir = cfg.text("output_dir");
  gimprint::runner::write_artifacts(result, cfg, dir);
  gimprint::runner::write_summary(std::cout, result);
  std::cout << "artifacts written to " << dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric-phase imprinting of matter waves: scenario runner"};
  app.require_subcommand(1);
  unsigned threads = 1;
  app.add_option("--threads", threads, "worker threads for per-point maps (results do not depend on it)")
      ->check(CLI::PositiveNumber);

  std::string scenario;
  std::string config_path;
  auto* run = app.add_subcommand("run", "run a scenario and write its artifacts");
  run->add_option("scenario", scenario, "chirp | abelian-rotation | tripod-translation | tripod-rotation | custom")
      ->required();
  run->add_option("--config", config_path, "key = value file; command-line overrides win");
  run->allow_extras();

  auto* verify = app.add_subcommand("verify", "check every invariant on reduced grids");

  std::string print_scenario;
  auto* print = app.add_subcommand("print-config", "print a scenario's documented defaults");
  print->add_option("scenario", print_scenario)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    gimprint::parallel::set_workers(threads);
    if (*run) return run_command(scenario, config_path, run->remaining());
    if (*verify) return gimprint::invariants::run_verify(std::cout) ? 0 : 1;
    if (*print) {
      std::cout << ScenarioConfig::preset(print_scenario).emit_documented();
      return 0;
    }
  } catch (const gimprint::ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const gimprint::AdiabaticityError& e) {
    std::cerr << "adiabaticity failure: " << e.what() << " (leakage " << e.leakage() << ")\n";
    return 3;
  } catch (const gimprint::ConsistencyError& e) {
    std::cerr << "internal consistency failure: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
