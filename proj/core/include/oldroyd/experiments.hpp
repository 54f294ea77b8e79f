#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oldroyd/config.hpp"
#include "oldroyd/energy.hpp"
#include "oldroyd/integrator.hpp"
#include "oldroyd/lab.hpp"

namespace oldroyd {

/// Process exit statuses shared by the CLI and the experiment drivers.
enum class ExitStatus : int { ok = 0, blow_up = 2, config_error = 3, threshold_failed = 4 };

/// Seeded band-limited data: u0 divergence-free, τ0 symmetric, both mean-zero
/// and each scaled to init.amplitude in H^{init.sigma}.
State initial_state(const ExperimentConfig& config, const Grid& grid);

struct SimulateResult {
  ExitStatus status = ExitStatus::ok;
  std::optional<double> blow_up_time;
  std::int64_t steps = 0;
  double t_final = 0.0;
  std::optional<EnergyLedger> ledger;
};

/// Writes energy.csv, trajectory.csv, final.oldb (+ sidecar) and summary.json into `dir`.
SimulateResult run_simulate(const ExperimentConfig& config, const std::filesystem::path& dir);

struct AuditResult {
  ExitStatus status = ExitStatus::ok;
  std::optional<double> blow_up_time;
  double e0 = 0.0;
  double fitted_constant = 0.0;
  bool bootstrap_flag = false;
  double max_cancellation_residual = 0.0;
  double max_e1_ratio = 0.0;  // max_t E1(t) / E1(first sample)
  std::optional<EnergyLedger> ledger;
};

/// Writes energy.csv and summary.json into `dir`.
AuditResult run_energy_audit(const ExperimentConfig& config, const std::filesystem::path& dir);

struct SweepMember {
  double nu = 0.0;
  bool valid = true;
  std::string failure;
  std::vector<double> t;
  std::vector<double> g;  // ‖ū‖_{H^s} + ‖τ̄‖_{H^s}
  double max_g = 0.0;
  double control_max_g = 0.0;
  double control_error = 0.0;  // |max_g - control_max_g| / control_max_g
  bool fitted = false;
};

struct RateReport {
  ExitStatus status = ExitStatus::ok;
  std::vector<SweepMember> members;
  /// Least squares of log(max_t G) against log ν over the fitted members.
  double slope = 0.0;
  double intercept = 0.0;
  double fit_residual = 0.0;
  int fitted_count = 0;
  bool monotone = true;
  std::vector<std::string> warnings;
  /// Reference diagnostics at the output times.
  std::vector<double> t;
  std::vector<double> m;            // ‖u‖_{H^{s+1}} + ‖τ‖_{H^{s+1}}
  std::vector<double> u_s_plus_2;   // ‖u‖_{H^{s+2}}
  std::vector<double> u_sigma;      // ‖u‖_{H^σ}
  /// Empirical constants of the difference inequality and the resulting ν0.
  double c1 = 0.0;
  double c2 = 0.0;
  double nu0 = 0.0;  // +inf when the fitted constant vanishes
};

/// Reference inviscid_diffusive run once, then one viscous_diffusive run per
/// ν (and a dt/2 control pair), executed on config.workers threads. Writes
/// sweep.csv, reference/M.csv, members/nu_<i>/G.csv and summary.json into
/// `dir` unless it is empty.
RateReport run_nu_sweep(const ExperimentConfig& config, const std::filesystem::path& dir);

struct BesovResult {
  std::vector<lp::LedgerEntry> ledger;
  double total = 0.0;
};

/// Reads the first field record of config.field.path and writes the per-band
/// ledger (j, 2^{js}‖Δ̇_j f‖) and total as CSV to `out` and besov.csv.
BesovResult run_besov_norm(const ExperimentConfig& config, const std::filesystem::path& dir, std::ostream& out);

struct CommutatorResult {
  ExitStatus status = ExitStatus::ok;
  lab::InequalityReport report;
  std::optional<lab::InequalityReport> refined;
  double refinement_change = 0.0;
};

/// Writes commutator.csv (seed, s, lhs, rhs, ratio, then one "max" row per s)
/// and summary.json.
CommutatorResult run_commutator_test(const ExperimentConfig& config, const std::filesystem::path& dir);

/// Runs config.experiment into `dir`, also writing config.echo (the fully
/// defaulted configuration) and metadata.json (the only file carrying a
/// timestamp). Returns the process exit status.
ExitStatus run_experiment(const ExperimentConfig& config, const std::filesystem::path& dir, std::ostream& log);

}  // namespace oldroyd
