#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "oldroyd/dynamics.hpp"
#include "oldroyd/integrator.hpp"
#include "oldroyd/lab.hpp"

namespace oldroyd {

enum class ExperimentKind { simulate, energy_audit, nu_sweep, besov_norm, commutator_test };

std::string_view to_string(ExperimentKind k);
ExperimentKind parse_experiment(std::string_view name);

/// Band-limited seeded random data, each field scaled to `amplitude` in H^sigma.
struct InitRecipe {
  std::uint64_t seed = 1;
  double k_min = 1.0;
  double k_max = 4.0;
  double slope = 0.0;
  double amplitude = 1e-2;
  double sigma = 6.0;

  bool operator==(const InitRecipe&) const = default;
};

struct SweepConfig {
  std::vector<double> nu_list{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  double s_diff = 1.0;
  bool dt_control = true;
  /// Members whose dt/2 control changes max_t G by more than this fraction are not fitted.
  double control_tolerance = 0.2;

  bool operator==(const SweepConfig&) const = default;
};

struct EnsembleConfig {
  lab::Inequality inequality = lab::Inequality::besov_commutator;
  std::uint64_t seed_base = 0;
  int samples = 50;
  std::vector<double> s_values{-1.0, 0.0, 1.0, 2.0};
  double k_min = 1.0;
  double k_max = 8.0;
  double slope = -1.0;
  /// Also evaluate on a grid of twice the size and report the change.
  bool refine = true;
  double refine_tolerance = 0.25;

  bool operator==(const EnsembleConfig&) const = default;
};

struct FieldQuery {
  std::string path;
  double s = 1.0;
  lp::NormKind norm = lp::NormKind::homogeneous_besov;

  bool operator==(const FieldQuery&) const = default;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::simulate;
  Grid grid{2, 64};
  ModelParams model;
  StepperConfig stepper;
  InitRecipe init;
  SweepConfig sweep;
  EnsembleConfig ensemble;
  FieldQuery field;
  std::string output_dir = "out";
  int workers = 1;
  /// Threshold checks of an experiment turn into exit status 4 when set.
  bool enforce_acceptance = false;

  /// Cross-field constraints; throws ConfigError naming the key.
  void validate() const;
  lab::EnsembleSpec ensemble_spec(const Grid& grid) const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses `key = value` lines ('#' starts a comment; lists are comma
/// separated). Unknown keys, repeated keys, malformed values and missing
/// required keys raise ConfigError carrying the key path. When the text has
/// no `experiment` key, `fallback` is used.
ExperimentConfig parse_config(std::string_view text, ExperimentKind fallback = ExperimentKind::simulate);
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentKind fallback = ExperimentKind::simulate);

/// Every key with its effective value, in a fixed order; parse_config of the
/// result reproduces the configuration exactly.
std::string emit_config(const ExperimentConfig& config);

}  // namespace oldroyd
