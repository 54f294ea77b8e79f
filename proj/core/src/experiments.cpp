#include "oldroyd/experiments.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "oldroyd/checkpoint.hpp"
#include "oldroyd/errors.hpp"
#include "oldroyd/operators.hpp"
#include "oldroyd/parallel.hpp"
#include "oldroyd/random_fields.hpp"
#include "oldroyd/state_io.hpp"
#include "oldroyd/text.hpp"

namespace oldroyd {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::ofstream open_output(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

// Non-finite values become JSON null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string status_name(ExitStatus s) {
  switch (s) {
    case ExitStatus::ok: return "ok";
    case ExitStatus::blow_up: return "blow_up";
    case ExitStatus::config_error: return "config_error";
    case ExitStatus::threshold_failed: return "threshold_failed";
  }
  return "unknown";
}

ModelParams reference_params() {
  ModelParams p;
  p.variant = Variant::inviscid_diffusive;
  p.nu = 0.0;
  return p;
}

double sobolev_pair(const State& s, double sigma) {
  return lp::sobolev_norm(s.u, sigma) + lp::sobolev_norm(s.tau, sigma);
}

double difference_norm(const State& a, const State& b, double s) {
  return lp::sobolev_norm(a.u - b.u, s) + lp::sobolev_norm(a.tau - b.tau, s);
}

// Snapshot diagnostics for trajectory.csv.
std::string trajectory_row(const State& s) {
  return csv_row({format_number(s.t), format_number(norm_l2(s.u)), format_number(norm_l2(s.tau)),
                  format_number(max_abs(s.u)), format_number(max_divergence(s.u))});
}

}  // namespace

State initial_state(const ExperimentConfig& config, const Grid& grid) {
  const auto& r = config.init;
  const Band band{r.k_min, r.k_max};
  VectorField u = random_divfree_field(grid, 2 * r.seed, r.slope, band);
  SymTensorField tau = random_symmetric_tensor(grid, 2 * r.seed + 1, r.slope, band);
  u *= r.amplitude / lp::sobolev_norm(u, r.sigma);
  tau *= r.amplitude / lp::sobolev_norm(tau, r.sigma);
  return State(std::move(u), std::move(tau));
}

SimulateResult run_simulate(const ExperimentConfig& config, const fs::path& dir) {
  SimulateResult result;
  const State s0 = initial_state(config, config.grid);

  std::string trajectory = "t,u_l2,tau_l2,max_abs_u,max_divergence\n";
  IntegrateOptions opt;
  opt.keep_snapshots = false;
  opt.observers.push_back([&](const State& s, std::int64_t) { trajectory += trajectory_row(s); });

  std::optional<Trajectory> traj;
  State last(config.grid);
  try {
    traj.emplace(integrate(s0, config.model, config.stepper, opt));
    last = traj->final_state;
    result.steps = traj->steps;
    result.ledger = traj->ledger;
  } catch (const BlowUp& e) {
    result.status = ExitStatus::blow_up;
    result.blow_up_time = e.last_valid_time();
    last = e.partial().final_state;
    result.steps = e.partial().steps;
    result.ledger = e.partial().ledger;
  }
  result.t_final = last.t;

  if (!dir.empty()) {
    write_text(dir / "trajectory.csv", trajectory);
    std::ostringstream energy;
    if (result.ledger) result.ledger->write_csv(energy);
    write_text(dir / "energy.csv", energy.str());
    save_state(dir / "final.oldb", last, config.model, config.stepper, result.steps);

    Json summary;
    summary["experiment"] = "simulate";
    summary["status"] = status_name(result.status);
    summary["steps"] = result.steps;
    summary["t_final"] = result.t_final;
    summary["blow_up_time"] = result.blow_up_time ? number(*result.blow_up_time) : Json(nullptr);
    if (result.ledger && !result.ledger->empty()) {
      summary["e0"] = number(result.ledger->e0());
      summary["e1_final"] = number(result.ledger->samples().back().e1);
      summary["e2_final"] = number(result.ledger->samples().back().e2());
    }
    write_json(dir / "summary.json", summary);
  }
  return result;
}

AuditResult run_energy_audit(const ExperimentConfig& config, const fs::path& dir) {
  AuditResult result;
  const State s0 = initial_state(config, config.grid);
  IntegrateOptions opt;
  opt.keep_snapshots = false;
  try {
    result.ledger = integrate(s0, config.model, config.stepper, opt).ledger;
  } catch (const BlowUp& e) {
    result.status = ExitStatus::blow_up;
    result.blow_up_time = e.last_valid_time();
    result.ledger = e.partial().ledger;
  }
  const auto& ledger = *result.ledger;
  result.e0 = ledger.e0();
  result.fitted_constant = ledger.fitted_constant();
  result.bootstrap_flag = ledger.bootstrap_flag();
  const double e1_0 = ledger.samples().front().e1;
  for (const auto& s : ledger.samples()) {
    result.max_cancellation_residual = std::max(result.max_cancellation_residual, s.cancellation_residual);
    if (e1_0 > 0.0) result.max_e1_ratio = std::max(result.max_e1_ratio, s.e1 / e1_0);
  }
  if (result.status == ExitStatus::ok && config.enforce_acceptance &&
      (result.bootstrap_flag || result.max_cancellation_residual > 1e-10)) {
    result.status = ExitStatus::threshold_failed;
  }

  if (!dir.empty()) {
    std::ostringstream energy;
    ledger.write_csv(energy);
    write_text(dir / "energy.csv", energy.str());
    Json summary;
    summary["experiment"] = "energy-audit";
    summary["status"] = status_name(result.status);
    summary["blow_up_time"] = result.blow_up_time ? number(*result.blow_up_time) : Json(nullptr);
    summary["n0"] = ledger.n0();
    summary["e0"] = number(result.e0);
    summary["fitted_constant"] = number(result.fitted_constant);
    summary["fitted_constant_note"] = "smallest C with E(t) <= C*E0 + C*E(t)^2 over the run; empirical";
    summary["bootstrap_flag"] = result.bootstrap_flag;
    summary["max_e1_ratio"] = number(result.max_e1_ratio);
    summary["max_cancellation_residual"] = number(result.max_cancellation_residual);
    write_json(dir / "summary.json", summary);
  }
  return result;
}

namespace {

// Reference trajectory at the output cadence for a given dt.
std::vector<State> reference_run(const State& s0, const StepperConfig& stepper) {
  IntegrateOptions opt;
  opt.energy_ledger = false;
  return integrate(s0, reference_params(), stepper, opt).snapshots;
}

// max_t G and the series of G for one member against a stored reference.
void member_run(const State& s0, double nu, const StepperConfig& stepper, const std::vector<State>& reference,
                double s_diff, std::vector<double>* t, std::vector<double>* g, double* max_g) {
  ModelParams p;
  p.variant = Variant::viscous_diffusive;
  p.nu = nu;
  IntegrateOptions opt;
  opt.keep_snapshots = false;
  opt.energy_ledger = false;
  std::size_t k = 0;
  *max_g = 0.0;
  opt.observers.push_back([&](const State& s, std::int64_t) {
    const double value = difference_norm(s, reference.at(k++), s_diff);
    if (t) t->push_back(s.t);
    if (g) g->push_back(value);
    *max_g = std::max(*max_g, value);
  });
  integrate(s0, p, stepper, opt);
}

struct Fit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  Fit f;
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

}  // namespace

RateReport run_nu_sweep(const ExperimentConfig& config, const fs::path& dir) {
  RateReport report;
  const auto& sw = config.sweep;
  const State s0 = initial_state(config, config.grid);
  const std::size_t count = sw.nu_list.size();

  // The reference runs complete before any member is compared against them.
  StepperConfig half = config.stepper;
  half.dt = 0.5 * config.stepper.dt;
  half.output_every = 2 * config.stepper.output_every;
  std::vector<State> reference, reference_half;
  parallel_for(sw.dt_control ? 2 : 1, config.workers, [&](std::size_t i) {
    if (i == 0) reference = reference_run(s0, config.stepper);
    else reference_half = reference_run(s0, half);
  });

  report.members.resize(count);
  const std::size_t tasks = sw.dt_control ? 2 * count : count;
  parallel_for(tasks, config.workers, [&](std::size_t i) {
    const std::size_t m = i % count;
    SweepMember& member = report.members[m];
    const bool control = i >= count;
    try {
      if (control) {
        member_run(s0, sw.nu_list[m], half, reference_half, sw.s_diff, nullptr, nullptr, &member.control_max_g);
      } else {
        member.nu = sw.nu_list[m];
        member_run(s0, sw.nu_list[m], config.stepper, reference, sw.s_diff, &member.t, &member.g, &member.max_g);
      }
    } catch (const Error& e) {
      // Written only by the main-run task to avoid sharing the string.
      if (!control) member.failure = e.what();
      else member.control_max_g = std::numeric_limits<double>::quiet_NaN();
    }
  });

  std::vector<double> lx, ly;
  for (std::size_t m = 0; m < count; ++m) {
    SweepMember& member = report.members[m];
    member.nu = sw.nu_list[m];
    member.valid = member.failure.empty() && std::isfinite(member.max_g);
    if (sw.dt_control) {
      member.control_error = std::abs(member.max_g - member.control_max_g) / member.control_max_g;
      if (!std::isfinite(member.control_error)) member.control_error = std::numeric_limits<double>::infinity();
    }
    member.fitted = member.valid && member.max_g > 0.0 && (!sw.dt_control || member.control_error <= sw.control_tolerance);
    if (!member.valid) report.warnings.push_back("nu=" + format_number(member.nu) + " invalid: " + member.failure);
    else if (!member.fitted) report.warnings.push_back("nu=" + format_number(member.nu) + " excluded by the dt control");
    if (member.fitted) {
      lx.push_back(std::log(member.nu));
      ly.push_back(std::log(member.max_g));
    }
  }
  report.fitted_count = static_cast<int>(lx.size());
  if (lx.size() >= 3) {
    const Fit f = least_squares(lx, ly);
    report.slope = f.slope;
    report.intercept = f.intercept;
    report.fit_residual = f.residual;
  } else {
    report.slope = report.intercept = report.fit_residual = std::numeric_limits<double>::quiet_NaN();
    report.warnings.push_back("fewer than three members usable for the rate fit");
  }
  for (std::size_t m = 1; m < count; ++m) {
    const auto& a = report.members[m - 1];
    const auto& b = report.members[m];
    if (a.fitted && b.fitted && b.max_g > a.max_g) {
      report.monotone = false;
      report.warnings.push_back("max G increases from nu=" + format_number(a.nu) + " to nu=" + format_number(b.nu));
    }
  }

  // Reference diagnostics and the empirical constants of
  // dG/dt <= ν‖u‖_{H^{s+2}} + C1 M G + C2 G².
  for (const auto& s : reference) {
    report.t.push_back(s.t);
    report.m.push_back(sobolev_pair(s, sw.s_diff + 1.0));
    report.u_s_plus_2.push_back(lp::sobolev_norm(s.u, sw.s_diff + 2.0));
    report.u_sigma.push_back(lp::sobolev_norm(s.u, config.init.sigma));
  }
  double c1 = 0.0;
  for (const auto& member : report.members) {
    if (!member.fitted) continue;
    for (std::size_t i = 0; i + 1 < member.g.size(); ++i) {
      const double dt = member.t[i + 1] - member.t[i];
      const double dg = (member.g[i + 1] - member.g[i]) / dt;
      const double g = 0.5 * (member.g[i] + member.g[i + 1]);
      const double mm = 0.5 * (report.m[i] + report.m[i + 1]);
      const double forcing = member.nu * 0.5 * (report.u_s_plus_2[i] + report.u_s_plus_2[i + 1]);
      if (g > 0.0 && mm > 0.0) c1 = std::max(c1, (dg - forcing) / (mm * g));
    }
  }
  report.c1 = c1;
  report.c2 = c1;
  // ν0 = (8 C2 ∫_0^T ‖u‖_{H^σ} exp(C1 ∫_{t'}^T M) dt')^{-1}, trapezoid in t'.
  const std::size_t nt = report.t.size();
  std::vector<double> tail(nt, 0.0);
  for (std::size_t i = nt; i-- > 1;) {
    tail[i - 1] = tail[i] + 0.5 * (report.t[i] - report.t[i - 1]) * (report.m[i] + report.m[i - 1]);
  }
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < nt; ++i) {
    const double a = report.u_sigma[i] * std::exp(report.c1 * tail[i]);
    const double b = report.u_sigma[i + 1] * std::exp(report.c1 * tail[i + 1]);
    integral += 0.5 * (report.t[i + 1] - report.t[i]) * (a + b);
  }
  const double denom = 8.0 * report.c2 * integral;
  report.nu0 = denom > 0.0 ? 1.0 / denom : std::numeric_limits<double>::infinity();

  const bool slope_ok = std::isfinite(report.slope) && std::abs(report.slope - 1.0) <= 0.15;
  if (config.enforce_acceptance && !slope_ok) report.status = ExitStatus::threshold_failed;

  if (!dir.empty()) {
    std::string sweep_csv = "nu,valid,max_G,control_max_G,control_error,fitted\n";
    for (std::size_t m = 0; m < count; ++m) {
      const auto& member = report.members[m];
      sweep_csv += csv_row({format_number(member.nu), member.valid ? "1" : "0", format_number(member.max_g),
                            format_number(member.control_max_g), format_number(member.control_error),
                            member.fitted ? "1" : "0"});
      std::string g_csv = "t,G\n";
      for (std::size_t i = 0; i < member.g.size(); ++i) {
        g_csv += csv_row({format_number(member.t[i]), format_number(member.g[i])});
      }
      write_text(dir / "members" / ("nu_" + std::to_string(m)) / "G.csv", g_csv);
    }
    write_text(dir / "sweep.csv", sweep_csv);
    std::string m_csv = "t,M,u_H_s_plus_2,u_H_sigma\n";
    for (std::size_t i = 0; i < nt; ++i) {
      m_csv += csv_row({format_number(report.t[i]), format_number(report.m[i]), format_number(report.u_s_plus_2[i]),
                        format_number(report.u_sigma[i])});
    }
    write_text(dir / "reference" / "M.csv", m_csv);

    Json summary;
    summary["experiment"] = "nu-sweep";
    summary["status"] = status_name(report.status);
    summary["s_diff"] = sw.s_diff;
    summary["slope"] = number(report.slope);
    summary["intercept"] = number(report.intercept);
    summary["fit_residual"] = number(report.fit_residual);
    summary["fitted_count"] = report.fitted_count;
    summary["monotone"] = report.monotone;
    Json members = Json::array();
    for (const auto& m : report.members) {
      members.push_back({{"nu", m.nu},
                         {"valid", m.valid},
                         {"max_G", number(m.max_g)},
                         {"control_max_G", number(m.control_max_g)},
                         {"control_error", number(m.control_error)},
                         {"fitted", m.fitted}});
    }
    summary["members"] = members;
    summary["c1_empirical"] = number(report.c1);
    summary["c2_empirical"] = number(report.c2);
    summary["nu0_empirical"] = number(report.nu0);
    summary["nu0_note"] =
        "empirical estimate: C1 is the smallest constant making the sampled difference inequality hold, C2 = C1";
    summary["warnings"] = report.warnings;
    write_json(dir / "summary.json", summary);
  }
  return report;
}

namespace {

template <class Shape>
BesovResult ledger_of(const FieldRecord& record, const FieldQuery& q) {
  const Field<Shape> f = as_spectral(from_record<Shape>(record));
  const auto cutoff = lp::DyadicCutoff::for_grid(f.grid());
  BesovResult r;
  if (q.norm == lp::NormKind::sobolev) {
    r.total = lp::sobolev_norm(f, q.s);
    return r;
  }
  r.ledger = lp::besov_ledger(f, q.s, cutoff);
  r.total = lp::besov_norm(f, lp::BesovSpec{q.s}, cutoff);
  return r;
}

}  // namespace

BesovResult run_besov_norm(const ExperimentConfig& config, const fs::path& dir, std::ostream& out) {
  std::ifstream in(config.field.path, std::ios::binary);
  if (!in) throw IoError("cannot open " + config.field.path);
  const FieldRecord record = read_record(in);
  const int dim = record.grid.dim();
  BesovResult r;
  if (record.components == ScalarShape::components(dim)) r = ledger_of<ScalarShape>(record, config.field);
  else if (record.components == VectorShape::components(dim)) r = ledger_of<VectorShape>(record, config.field);
  else if (record.components == SymTensorShape::components(dim)) r = ledger_of<SymTensorShape>(record, config.field);
  else if (record.components == TensorShape::components(dim)) r = ledger_of<TensorShape>(record, config.field);
  else throw IoError("unsupported component count in " + config.field.path);

  std::string csv = "j,weighted\n";
  for (const auto& e : r.ledger) csv += csv_row({std::to_string(e.j), format_number(e.weighted)});
  csv += csv_row({"total", format_number(r.total)});
  out << csv;
  if (!dir.empty()) write_text(dir / "besov.csv", csv);
  return r;
}

CommutatorResult run_commutator_test(const ExperimentConfig& config, const fs::path& dir) {
  CommutatorResult result;
  result.report = lab::run_ensemble(config.ensemble_spec(config.grid), config.workers);
  if (config.ensemble.refine) {
    const Grid fine(config.grid.dim(), 2 * config.grid.size(), config.grid.dealias_fraction());
    result.refined = lab::run_ensemble(config.ensemble_spec(fine), config.workers);
    result.refinement_change = lab::refinement_change(result.report, *result.refined);
  }
  const bool finite = result.report.all_finite && (!result.refined || result.refined->all_finite);
  if (config.enforce_acceptance && (!finite || result.refinement_change >= config.ensemble.refine_tolerance)) {
    result.status = ExitStatus::threshold_failed;
  }

  if (!dir.empty()) {
    std::string csv = "seed,s,lhs,rhs,ratio\n";
    for (const auto& s : result.report.samples) {
      csv += csv_row({std::to_string(s.seed), format_number(s.s), format_number(s.lhs), format_number(s.rhs),
                      format_number(s.ratio)});
    }
    for (std::size_t k = 0; k < config.ensemble.s_values.size(); ++k) {
      csv += csv_row({"max", format_number(config.ensemble.s_values[k]), "", "", format_number(result.report.max_ratio[k])});
    }
    write_text(dir / "commutator.csv", csv);

    Json summary;
    summary["experiment"] = "commutator-test";
    summary["status"] = status_name(result.status);
    summary["inequality"] = std::string(lab::to_string(config.ensemble.inequality));
    summary["grid_size"] = config.grid.size();
    summary["samples"] = config.ensemble.samples;
    summary["band"] = {config.ensemble.k_min, config.ensemble.k_max};
    Json per_s = Json::array();
    for (std::size_t k = 0; k < config.ensemble.s_values.size(); ++k) {
      Json row{{"s", config.ensemble.s_values[k]}, {"max_ratio", number(result.report.max_ratio[k])}};
      if (result.refined) row["max_ratio_refined"] = number(result.refined->max_ratio[k]);
      per_s.push_back(row);
    }
    summary["per_s"] = per_s;
    summary["all_finite"] = finite;
    summary["refinement_change"] = result.refined ? number(result.refinement_change) : Json(nullptr);
    write_json(dir / "summary.json", summary);
  }
  return result;
}

ExitStatus run_experiment(const ExperimentConfig& config, const fs::path& dir, std::ostream& log) {
  fs::create_directories(dir);
  write_text(dir / "config.echo", emit_config(config));

  ExitStatus status = ExitStatus::ok;
  switch (config.experiment) {
    case ExperimentKind::simulate: {
      const auto r = run_simulate(config, dir);
      status = r.status;
      log << "simulate: " << status_name(status) << " at t = " << r.t_final << " after " << r.steps << " steps\n";
      break;
    }
    case ExperimentKind::energy_audit: {
      const auto r = run_energy_audit(config, dir);
      status = r.status;
      log << "energy-audit: E0 = " << r.e0 << ", fitted C = " << r.fitted_constant
          << ", flag = " << (r.bootstrap_flag ? "tripped" : "clear") << '\n';
      break;
    }
    case ExperimentKind::nu_sweep: {
      const auto r = run_nu_sweep(config, dir);
      status = r.status;
      log << "nu-sweep: slope = " << r.slope << " over " << r.fitted_count << " viscosities\n";
      for (const auto& w : r.warnings) log << "warning: " << w << '\n';
      break;
    }
    case ExperimentKind::besov_norm: run_besov_norm(config, dir, log); break;
    case ExperimentKind::commutator_test: {
      const auto r = run_commutator_test(config, dir);
      status = r.status;
      log << "commutator-test: " << r.report.samples.size() << " samples";
      if (r.refined) log << ", refinement change " << r.refinement_change;
      log << '\n';
      break;
    }
  }

  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream stamp;
  stamp << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
  Json meta;
  meta["tool"] = "oldroyd";
  meta["experiment"] = std::string(to_string(config.experiment));
  meta["status"] = status_name(status);
  meta["exit_code"] = static_cast<int>(status);
  meta["workers"] = config.workers;
  meta["seed"] = config.init.seed;
  meta["created_utc"] = stamp.str();
  write_json(dir / "metadata.json", meta);
  return status;
}

}  // namespace oldroyd
