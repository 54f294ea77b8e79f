#include <CLI11.hpp>

#include <oldroyd/errors.hpp>
#include <oldroyd/experiments.hpp>

#include <iostream>
#include <optional>

using namespace oldroyd;

namespace {

struct Options {
  std::string config;
  std::optional<std::string> out;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "key = value configuration file")->required();
  cmd->add_option("--out", o.out, "output directory (overrides output.dir)");
  cmd->add_option("--workers", o.workers, "worker threads (overrides run.workers)");
  cmd->add_option("--seed", o.seed, "seed for initial data and ensembles (overrides init.seed, ensemble.seed_base)");
}

int run(ExperimentKind kind, const Options& o) {
  ExperimentConfig config = load_config(o.config, kind);
  if (config.experiment != kind) {
    throw ConfigError("file selects '" + std::string(to_string(config.experiment)) + "' but the subcommand is '" +
                          std::string(to_string(kind)) + "'",
                      "experiment");
  }
  if (o.out) config.output_dir = *o.out;
  if (o.workers) config.workers = *o.workers;
  if (o.seed) {
    config.init.seed = *o.seed;
    config.ensemble.seed_base = *o.seed;
  }
  config.validate();
  return static_cast<int>(run_experiment(config, config.output_dir, std::cout));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oldroyd-B pseudo-spectral solver and analysis harness"};
  app.require_subcommand(1);

  Options options;
  std::optional<ExperimentKind> chosen;
  for (auto kind : {ExperimentKind::simulate, ExperimentKind::nu_sweep, ExperimentKind::energy_audit,
                    ExperimentKind::besov_norm, ExperimentKind::commutator_test}) {
    auto* cmd = app.add_subcommand(std::string(to_string(kind)));
    add_common(cmd, options);
    cmd->callback([&chosen, kind] { chosen = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitStatus::config_error);
  }

  try {
    return run(*chosen, options);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return static_cast<int>(ExitStatus::config_error);
  } catch (const CflViolation& e) {
    // The configured dt is too large for the evolving data.
    std::cerr << "config error: stepper.dt: " << e.what() << '\n';
    return static_cast<int>(ExitStatus::config_error);
  } catch (const BlowUp& e) {
    std::cerr << "blow-up after t = " << e.last_valid_time() << '\n';
    return static_cast<int>(ExitStatus::blow_up);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
