#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "oldroyd/dynamics.hpp"
#include "oldroyd/energy.hpp"
#include "oldroyd/errors.hpp"

namespace oldroyd {

/// Integrating-factor Runge–Kutta: the linear part is solved exactly per mode
/// and the explicit terms are advanced with the classical tableau on the
/// transformed variable.
enum class Scheme { ifrk2, ifrk4 };

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view name);
inline int order(Scheme s) { return s == Scheme::ifrk2 ? 2 : 4; }

struct StepperConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::ifrk4;
  double t_end = 1.0;
  /// Steps between stored snapshots and observer calls.
  int output_every = 10;
  double cfl_safety = 0.5;
  /// Drop the explicit terms (used to test the linear propagator).
  bool linear_only = false;

  void validate() const;
  bool operator==(const StepperConfig&) const = default;
};

class CflViolation : public Error {
 public:
  CflViolation(double dt, double admissible);
  double admissible_dt() const noexcept { return admissible_; }

 private:
  double admissible_;
};

/// dx / (max_x |u(x)| + guard).
double cfl_estimate(const State& s, double guard = 1e-12);

/// One-step map for fixed (grid, params, dt, scheme). Holds only immutable
/// per-mode exponentials, so a single instance may be shared across threads.
class Stepper {
 public:
  Stepper(const Grid& grid, const ModelParams& params, const StepperConfig& config);

  /// Advances by dt. The velocity is re-projected and both fields dealiased;
  /// `t` increases by dt. Throws CflViolation when dt is inadmissible.
  State step(const State& s) const;

  const ModelParams& params() const noexcept { return params_; }
  const StepperConfig& config() const noexcept { return config_; }

 private:
  Tendency explicit_part(const State& s) const;

  Grid grid_;
  ModelParams params_;
  StepperConfig config_;
  std::vector<double> eu_full_, eu_half_, et_full_, et_half_;
};

struct Trajectory {
  /// States at the output cadence, first at the initial time.
  std::vector<State> snapshots;
  std::optional<EnergyLedger> ledger;
  /// Absolute step index of the last state reached.
  std::int64_t steps = 0;
  State final_state;

  explicit Trajectory(const Grid& g) : final_state(g) {}
};

class BlowUp : public Error {
 public:
  BlowUp(double last_valid_time, std::shared_ptr<Trajectory> partial);
  double last_valid_time() const noexcept { return last_valid_; }
  const Trajectory& partial() const { return *partial_; }

 private:
  double last_valid_;
  std::shared_ptr<Trajectory> partial_;
};

using Observer = std::function<void(const State&, std::int64_t step)>;

struct IntegrateOptions {
  bool keep_snapshots = true;
  bool energy_ledger = true;
  /// Absolute step index of the initial state; t = step * dt throughout.
  std::int64_t start_step = 0;
  std::vector<Observer> observers;
};

/// Runs from s0 to config.t_end. Observers and the ledger see every
/// output_every-th state and the final one. Non-finite values raise BlowUp.
Trajectory integrate(const State& s0, const ModelParams& params, const StepperConfig& config,
                     const IntegrateOptions& options = {});

/// Number of steps between start_step*dt and t_end; throws unless t_end is a whole number of steps away.
std::int64_t step_count(const StepperConfig& config, std::int64_t start_step);

}  // namespace oldroyd
