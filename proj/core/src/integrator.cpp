#include "oldroyd/integrator.hpp"

#include <cmath>
#include <string>

#include "oldroyd/operators.hpp"

namespace oldroyd {

std::string_view to_string(Scheme s) { return s == Scheme::ifrk2 ? "ifrk2" : "ifrk4"; }

Scheme parse_scheme(std::string_view name) {
  if (name == "ifrk2") return Scheme::ifrk2;
  if (name == "ifrk4") return Scheme::ifrk4;
  throw ConfigError("unknown scheme '" + std::string(name) + "'", "stepper.scheme");
}

void StepperConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("must be positive", "stepper.dt");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("must be non-negative", "stepper.t_end");
  if (output_every < 1) throw ConfigError("must be at least 1", "stepper.output_every");
  if (!(cfl_safety > 0.0 && cfl_safety < 1.0)) throw ConfigError("must lie in (0, 1)", "stepper.cfl_safety");
}

CflViolation::CflViolation(double dt, double admissible)
    : Error("time step " + std::to_string(dt) + " exceeds the admissible " + std::to_string(admissible)),
      admissible_(admissible) {}

BlowUp::BlowUp(double last_valid_time, std::shared_ptr<Trajectory> partial)
    : Error("non-finite field after t = " + std::to_string(last_valid_time)),
      last_valid_(last_valid_time),
      partial_(std::move(partial)) {}

double cfl_estimate(const State& s, double guard) {
  return s.grid().spacing() / (max_abs(s.u) + guard);
}

std::int64_t step_count(const StepperConfig& config, std::int64_t start_step) {
  const double t0 = static_cast<double>(start_step) * config.dt;
  const double span = (config.t_end - t0) / config.dt;
  const auto n = static_cast<std::int64_t>(std::llround(span));
  if (n < 0 || std::abs(span - static_cast<double>(n)) > 1e-9 * std::max(1.0, std::abs(span))) {
    throw ConfigError("t_end is not a whole number of steps from the start time", "stepper.dt");
  }
  return n;
}

namespace {

template <class Shape>
void scale_modes(Field<Shape>& f, const std::vector<double>& factor) {
  for (int c = 0; c < f.components(); ++c) {
    auto z = f.coefficients(c);
    for (std::size_t m = 0; m < z.size(); ++m) z[m] *= factor[m];
  }
}

// Linear combination a·x + c·y, with optional per-mode factors applied afterwards.
struct Pair {
  VectorField u;
  SymTensorField tau;
};

Pair make(const State& s) { return {s.u, s.tau}; }
Pair make(const Tendency& t) { return {t.du, t.dtau}; }

Pair& axpy(Pair& p, double c, const Pair& x) {
  p.u.axpy(c, x.u);
  p.tau.axpy(c, x.tau);
  return p;
}

Pair& scale(Pair& p, const std::vector<double>& eu, const std::vector<double>& et) {
  scale_modes(p.u, eu);
  scale_modes(p.tau, et);
  return p;
}

}  // namespace

Stepper::Stepper(const Grid& grid, const ModelParams& params, const StepperConfig& config)
    : grid_(grid), params_(params), config_(config) {
  params_.validate();
  config_.validate();
  const auto& mag = modes(grid).magnitude;
  const std::size_t n = mag.size();
  eu_full_.resize(n);
  eu_half_.resize(n);
  et_full_.resize(n);
  et_half_.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double lu = params_.velocity_rate(mag[m]);
    const double lt = params_.stress_rate(mag[m]);
    eu_full_[m] = std::exp(-lu * config_.dt);
    eu_half_[m] = std::exp(-0.5 * lu * config_.dt);
    et_full_[m] = std::exp(-lt * config_.dt);
    et_half_[m] = std::exp(-0.5 * lt * config_.dt);
  }
}

Tendency Stepper::explicit_part(const State& s) const {
  if (config_.linear_only) {
    return {VectorField(grid_, Representation::spectral), SymTensorField(grid_, Representation::spectral)};
  }
  return explicit_terms(s, params_);
}

State Stepper::step(const State& s) const {
  const double dt = config_.dt;
  if (!config_.linear_only) {
    const double admissible = config_.cfl_safety * cfl_estimate(s);
    if (dt > admissible) throw CflViolation(dt, admissible);
  }
  const auto eval = [&](const Pair& p) { return make(explicit_part(State(p.u, p.tau, s.t))); };
  const auto full = [&](Pair p) -> Pair { return std::move(scale(p, eu_full_, et_full_)); };
  const auto half = [&](Pair p) -> Pair { return std::move(scale(p, eu_half_, et_half_)); };

  const Pair u0 = make(s);
  Pair next = full(u0);
  if (config_.scheme == Scheme::ifrk2) {
    const Pair k1 = eval(u0);
    Pair stage = u0;
    const Pair k2 = eval(full(axpy(stage, dt, k1)));
    axpy(next, 0.5 * dt, full(k1));
    axpy(next, 0.5 * dt, k2);
  } else {
    const Pair a = eval(u0);
    Pair s1 = u0;
    const Pair b = eval(half(axpy(s1, 0.5 * dt, a)));
    Pair s2 = half(u0);
    const Pair c = eval(axpy(s2, 0.5 * dt, b));
    Pair s3 = full(u0);
    const Pair d = eval(axpy(s3, dt, half(c)));
    Pair mid = b;
    axpy(mid, 1.0, c);
    axpy(next, dt / 6.0, full(a));
    axpy(next, dt / 3.0, half(std::move(mid)));
    axpy(next, dt / 6.0, d);
  }
  return State(dealias(leray_project(next.u)), dealias(next.tau), s.t + dt);
}

Trajectory integrate(const State& s0, const ModelParams& params, const StepperConfig& config,
                     const IntegrateOptions& options) {
  const Stepper stepper(s0.grid(), params, config);
  const std::int64_t n = step_count(config, options.start_step);
  auto traj = std::make_shared<Trajectory>(s0.grid());
  if (options.energy_ledger) traj->ledger.emplace(s0.grid(), params);

  const auto emit = [&](const State& s, std::int64_t step) {
    if (options.keep_snapshots) traj->snapshots.push_back(s);
    if (traj->ledger) traj->ledger->record(s);
    for (const auto& obs : options.observers) obs(s, step);
  };

  State current = s0;
  current.t = static_cast<double>(options.start_step) * config.dt;
  traj->steps = options.start_step;
  emit(current, traj->steps);
  for (std::int64_t i = 1; i <= n; ++i) {
    State next = stepper.step(current);
    if (!next.finite()) {
      traj->final_state = current;
      throw BlowUp(current.t, traj);
    }
    const std::int64_t step = options.start_step + i;
    next.t = static_cast<double>(step) * config.dt;
    current = std::move(next);
    traj->steps = step;
    if (i % config.output_every == 0 || i == n) emit(current, step);
  }
  traj->final_state = std::move(current);
  return std::move(*traj);
}

}  // namespace oldroyd
