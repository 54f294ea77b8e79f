#include <catch_amalgamated.hpp>

#include <oldroyd/integrator.hpp>
#include <oldroyd/random_fields.hpp>
#include <oldroyd/state_io.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "oracles.hpp"

using namespace oldroyd;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ModelParams gnd(double nu = 0.05, double alpha = 1.5) {
  ModelParams p;
  p.nu = nu;
  p.alpha = alpha;
  p.k1 = 1.0;
  p.k2 = 1.0;
  return p;
}

// Random state scaled so that max|u| = umax.
State scaled_state(const Grid& g, std::uint64_t seed, double umax) {
  auto u = random_divfree_field(g, seed, -1.0, {1.0, 6.0});
  auto tau = random_symmetric_tensor(g, seed + 500, -1.0, {1.0, 6.0});
  const double c = umax / max_abs(u);
  return State(c * u, c * tau);
}

double state_diff(const State& a, const State& b) { return norm_l2(a.u - b.u) + norm_l2(a.tau - b.tau); }

std::filesystem::path scratch_dir() {
  auto dir = std::filesystem::temp_directory_path() / "oldroyd_integrator_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("Stepper configuration", "[integrator]") {
  StepperConfig c;
  CHECK_NOTHROW(c.validate());
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.cfl_safety = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.output_every = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = {};
  c.dt = 0.1;
  c.t_end = 1.0;
  CHECK(step_count(c, 0) == 10);
  CHECK(step_count(c, 4) == 6);
  c.t_end = 1.05;
  CHECK_THROWS_AS(step_count(c, 0), ConfigError);
  CHECK(parse_scheme("ifrk2") == Scheme::ifrk2);
  CHECK_THROWS_AS(parse_scheme("euler"), ConfigError);
}

TEST_CASE("Linear propagation is exact", "[integrator]") {
  const Grid g(2, 32);
  for (double alpha : {1.25, 1.5, 2.0}) {
    for (auto scheme : {Scheme::ifrk2, Scheme::ifrk4}) {
      const auto p = gnd(0.3, alpha);
      StepperConfig c;
      c.dt = 0.01;
      c.scheme = scheme;
      c.linear_only = true;
      const std::array<int, 3> k{2, 3, 0};
      State s(fourier_mode<VectorShape>(g, k, 0, 3.0) , SymTensorField(g, Representation::spectral));
      // make it solenoidal: u = (3, -2) cos(k·x)
      s.u = fourier_mode<VectorShape>(g, k, 0, 3.0) + fourier_mode<VectorShape>(g, k, 1, -2.0);
      const auto m = *mode_index(g, k);
      const Complex a0 = s.u.coefficients(0)[m];
      const double rate = p.nu * std::pow(std::hypot(2.0, 3.0), alpha);
      const Stepper stepper(g, p, c);

      State one = stepper.step(s);
      CHECK(std::abs(one.u.coefficients(0)[m] - a0 * std::exp(-rate * c.dt)) <= 1e-14 * std::abs(a0));
      for (int n = 2; n <= 100; ++n) one = stepper.step(one);
      CHECK(std::abs(one.u.coefficients(0)[m] - a0 * std::exp(-rate * 100 * c.dt)) <= 1e-12 * std::abs(a0));
    }
  }

  // Every mode of a random state, stress diffusion included.
  ModelParams d;
  d.variant = Variant::viscous_diffusive;
  d.nu = 0.02;
  StepperConfig c;
  c.dt = 0.02;
  c.linear_only = true;
  const auto s0 = scaled_state(g, 3, 1.0);
  const Stepper stepper(g, d, c);
  State s = s0;
  for (int n = 0; n < 100; ++n) s = stepper.step(s);
  const auto& mag = modes(g).magnitude;
  const double T = 100 * c.dt;
  const auto expected_u = apply_multiplier(s0.u, [&](std::size_t m) { return std::exp(-d.nu * mag[m] * mag[m] * T); });
  const auto expected_tau = apply_multiplier(s0.tau, [&](std::size_t m) { return std::exp(-mag[m] * mag[m] * T); });
  CHECK(oracle::rel_diff(s.u, expected_u) <= 1e-12);
  CHECK(oracle::rel_diff(s.tau, expected_tau) <= 1e-12);
  CHECK(s.t == Catch::Approx(T));
}

TEST_CASE("Trivial trajectories", "[integrator]") {
  const Grid g(2, 32);
  StepperConfig c;
  c.dt = 0.05;
  c.t_end = 0.5;
  c.output_every = 2;
  const auto traj = integrate(State(g), gnd(), c);
  for (const auto& s : traj.snapshots) {
    CHECK(oracle::max_coefficient(s.u) == 0.0);
    CHECK(oracle::max_coefficient(s.tau) == 0.0);
  }
  CHECK(traj.snapshots.size() == 6);
  CHECK(traj.snapshots.front().t == 0.0);
  for (std::size_t i = 1; i < traj.snapshots.size(); ++i) CHECK(traj.snapshots[i].t > traj.snapshots[i - 1].t);
  CHECK(traj.ledger->samples().size() == 6);
  CHECK(traj.steps == 10);

  c.t_end = 0.0;
  const auto single = integrate(scaled_state(g, 1, 0.5), gnd(), c);
  CHECK(single.snapshots.size() == 1);
  CHECK(single.steps == 0);
}

TEST_CASE("CFL estimate", "[integrator]") {
  const Grid g(2, 32);
  const double dx = g.spacing();
  CHECK(cfl_estimate(State(g)) == dx / 1e-12);

  const auto s = scaled_state(g, 2, 1.0);
  State doubled(2.0 * s.u, s.tau);
  CHECK_THAT(cfl_estimate(doubled, 0.0), WithinRel(0.5 * cfl_estimate(s, 0.0), 1e-14));

  const auto up = to_physical(s.u);
  double brute = 0.0;
  for (std::size_t x = 0; x < g.physical_points(); ++x) {
    brute = std::max(brute, std::hypot(up.values(0)[x], up.values(1)[x]));
  }
  CHECK_THAT(cfl_estimate(s), WithinRel(dx / (brute + 1e-12), 1e-14));

  StepperConfig c;
  c.dt = 0.5;
  c.cfl_safety = 0.5;
  const Stepper stepper(g, gnd(), c);
  try {
    stepper.step(s);
    FAIL("expected a CFL violation");
  } catch (const CflViolation& e) {
    CHECK_THAT(e.admissible_dt(), WithinRel(0.5 * cfl_estimate(s), 1e-14));
  }
}

TEST_CASE("Projection after every step", "[integrator]") {
  const Grid g(2, 32);
  StepperConfig c;
  c.dt = 0.02;
  c.t_end = 0.4;
  c.output_every = 1;
  const auto traj = integrate(scaled_state(g, 7, 1.0), gnd(), c);
  for (const auto& s : traj.snapshots) CHECK(max_divergence(s.u) <= 1e-12);
}

TEST_CASE("Temporal order by self-convergence", "[integrator][slow]") {
  const Grid g(2, 32);
  const auto s0 = scaled_state(g, 11, 1.0);
  const auto p = gnd(0.05, 1.5);
  const double T = 0.25;
  for (auto scheme : {Scheme::ifrk2, Scheme::ifrk4}) {
    StepperConfig c;
    c.scheme = scheme;
    c.t_end = T;
    c.output_every = 1 << 20;
    IntegrateOptions opt;
    opt.keep_snapshots = false;
    opt.energy_ledger = false;

    const auto run = [&](double dt) {
      c.dt = dt;
      return integrate(s0, p, c, opt).final_state;
    };
    const double base = T / 8;
    const auto ref = run(base / 16 / 4);
    std::vector<double> err;
    for (int h = 0; h < 3; ++h) err.push_back(state_diff(run(base / (1 << h)), ref));
    const double slope = std::log2(err[1] / err[2]);
    const double slope0 = std::log2(err[0] / err[1]);
    INFO("scheme " << to_string(scheme) << " errors " << err[0] << " " << err[1] << " " << err[2]);
    CHECK(std::abs(slope - order(scheme)) <= 0.2);
    CHECK(std::abs(slope0 - order(scheme)) <= 0.3);
  }
}

TEST_CASE("Energy drift converges at the scheme order", "[integrator][slow]") {
  const Grid g(2, 32);
  const auto s0 = scaled_state(g, 13, 1.0);
  const auto p = gnd(0.1, 1.5);
  const double T = 0.5;
  for (auto scheme : {Scheme::ifrk2, Scheme::ifrk4}) {
    std::vector<double> drift;
    for (double dt : {T / 40, T / 80, T / 160}) {  // explicit coupling needs |k|dt well below one
      StepperConfig c;
      c.scheme = scheme;
      c.dt = dt;
      c.t_end = T;
      c.output_every = 1;
      IntegrateOptions opt;
      opt.energy_ledger = false;
      const auto traj = integrate(s0, p, c, opt);
      // Dissipation integrated with Simpson's rule over pairs of steps.
      double integral = 0.0;
      const auto& snaps = traj.snapshots;
      for (std::size_t i = 0; i + 2 < snaps.size(); i += 2) {
        integral += dt / 3.0 *
                    (dissipation_rate(snaps[i], p) + 4.0 * dissipation_rate(snaps[i + 1], p) +
                     dissipation_rate(snaps[i + 2], p));
      }
      const double delta = weighted_energy(snaps.back(), p) - weighted_energy(snaps.front(), p);
      drift.push_back(std::abs(delta + integral));
    }
    INFO("drift " << drift[0] << " " << drift[1] << " " << drift[2]);
    CHECK(std::log2(drift[1] / drift[2]) == Catch::Approx(order(scheme)).margin(0.3));
  }
}

TEST_CASE("Blow-up is reported with the last valid time", "[integrator]") {
  const Grid g(2, 32);
  auto s = scaled_state(g, 1, 0.5);
  StepperConfig c;
  c.dt = 0.01;
  c.t_end = 0.1;
  c.output_every = 1;
  const Stepper stepper(g, gnd(), c);
  // Corrupt one coefficient; the first step then produces NaN everywhere.
  s.tau.coefficients(0)[5] = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
  try {
    integrate(s, gnd(), c);
    FAIL("expected blow-up");
  } catch (const BlowUp& e) {
    CHECK(e.last_valid_time() == 0.0);
    CHECK(e.partial().snapshots.size() == 1);
  }
}

TEST_CASE("Determinism and restart", "[integrator]") {
  const Grid g(2, 32);
  const auto s0 = scaled_state(g, 21, 1.0);
  const auto p = gnd(0.05, 1.25);
  StepperConfig c;
  c.dt = 0.01;
  c.t_end = 0.4;
  c.output_every = 5;

  const auto a = integrate(s0, p, c);
  const auto b = integrate(s0, p, c);
  REQUIRE(a.snapshots.size() == b.snapshots.size());
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) CHECK(a.snapshots[i].identical(b.snapshots[i]));

  // Stop half way, checkpoint, reload, continue.
  StepperConfig first = c;
  first.t_end = 0.2;
  const auto head = integrate(s0, p, first);
  const auto path = scratch_dir() / "mid.oldb";
  save_state(path, head.final_state, p, c, head.steps);
  const auto ck = load_state(path);
  CHECK(ck.step == head.steps);
  CHECK(ck.params == p);
  CHECK(ck.config == c);
  CHECK(ck.state.identical(head.final_state));

  IntegrateOptions opt;
  opt.start_step = ck.step;
  const auto tail = integrate(ck.state, ck.params, ck.config, opt);
  CHECK(tail.final_state.identical(a.final_state));
  CHECK(tail.steps == a.steps);

  std::filesystem::remove(sidecar_path(path));
  CHECK_THROWS_AS(load_state(path), IoError);
}

TEST_CASE("Independent trajectories on several threads", "[integrator]") {
  const Grid g(2, 32);
  const auto s0 = scaled_state(g, 5, 1.0);
  const auto p = gnd(0.05, 1.5);
  StepperConfig c;
  c.dt = 0.02;
  c.t_end = 0.2;
  const auto serial = integrate(s0, p, c);
  std::vector<State> results(3, State(g));
  {
    std::vector<std::jthread> pool;
    for (int i = 0; i < 3; ++i) pool.emplace_back([&, i] { results[i] = integrate(s0, p, c).final_state; });
  }
  for (const auto& r : results) CHECK(r.identical(serial.final_state));
}
