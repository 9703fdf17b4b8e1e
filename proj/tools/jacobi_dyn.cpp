// jacobi-dyn: run, compare and validate Jacobi-group dynamics experiments.
//
// Exit codes: 0 success, 1 configuration error, 2 tolerance failure
// (compare/oracle), 3 numerical failure (domain exit, singularity, truncation).

#include <cmath>
#include <iostream>

#include <CLI11.hpp>

#include "jacobi/runner.hpp"

namespace {

using namespace jacobi;

enum class Mode { Run, Compare, Oracle, Validate };

constexpr int kExitConfig = 1;
constexpr int kExitTolerance = 2;
constexpr int kExitNumerical = 3;

void summarize(const runner::ExperimentConfig& cfg, const runner::BatchResult& r) {
  std::cout << cfg.name << " [" << runner::method_name(cfg.method) << "] ";
  if (!r.error.empty()) {
    std::cout << "ERROR " << r.error << '\n';
    return;
  }
  const auto& j = r.report.json;
  std::cout << (r.report.passed ? "ok" : "FAILED");
  for (const char* key : {"max_deviation", "margin_min", "energy_drift"}) {
    if (j.contains(key) && j[key].is_number() && std::isfinite(j[key].get<double>())) std::cout << ' ' << key << '=' << j[key].get<double>();
  }
  if (j.contains("phase_bridge")) std::cout << " phase_bridge=" << j["phase_bridge"]["max_residual"].get<double>();
  if (j.contains("fock")) std::cout << " fidelity=" << j["fock"]["fidelity"].get<double>();
  std::cout << '\n';
  if (cfg.output.report.empty()) std::cout << j.dump(2) << '\n';
}

int execute(Mode mode, const std::string& config_path, int threads) {
  std::vector<runner::ExperimentConfig> cfgs;
  try {
    cfgs = runner::load_config_file(config_path);
    for (auto& cfg : cfgs) {
      if (mode == Mode::Compare) cfg.method = runner::Method::CompareAll;
      if (mode == Mode::Oracle) cfg.method = runner::Method::FockOracle;
      cfg.validate();
    }
    if (threads <= 0) threads = runner::thread_count_from_env();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (mode == Mode::Validate) {
    std::cout << config_path << ": " << cfgs.size() << " experiment(s) valid\n";
    return 0;
  }

  std::vector<runner::BatchResult> results;
  try {
    results = runner::run_batch(cfgs, threads);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  int code = 0;
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    summarize(cfgs[i], results[i]);
    if (!results[i].error.empty()) {
      code = kExitNumerical;
    } else if (!results[i].report.passed && (mode == Mode::Compare || mode == Mode::Oracle) && code == 0) {
      code = kExitTolerance;
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wei-Norman and coherent-state dynamics on the Siegel-Jacobi disk and ball"};
  app.require_subcommand(1);
  std::string config;
  int threads = 0;

  struct Entry {
    const char* name;
    const char* help;
    Mode mode;
  };
  const Entry entries[] = {
      {"run", "run the experiment(s) with the configured method", Mode::Run},
      {"compare", "run every method (compare-all) and check the tolerances", Mode::Compare},
      {"oracle", "check the Wei-Norman solution against truncated-Fock propagation", Mode::Oracle},
      {"validate", "parse and validate the configuration only", Mode::Validate},
  };
  std::vector<std::pair<CLI::App*, Mode>> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("-c,--config", config, "JSON experiment file")->required()->check(CLI::ExistingFile);
    sub->add_option("-j,--threads", threads, "worker threads for batch files (default: JACOBI_THREADS or all cores)")
        ->check(CLI::PositiveNumber);
    subs.emplace_back(sub, e.mode);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  for (const auto& [sub, mode] : subs) {
    if (sub->parsed()) {
      try {
        return execute(mode, config, threads);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
      }
    }
  }
  return kExitConfig;
}
