#include "oldroyd/energy.hpp"

#include <algorithm>
#include <ostream>

#include "oldroyd/errors.hpp"
#include "oldroyd/text.hpp"

namespace oldroyd {

EnergyLedger::EnergyLedger(const Grid& grid, const ModelParams& params)
    : cutoff_(lp::DyadicCutoff::for_grid(grid)),
      params_(params),
      n0_(params.variant == Variant::generalized_no_damping ? n0_threshold(params.alpha) : 0),
      s1_(0.5 * grid.dim() + 1.0 - params.alpha),
      half_n_(0.5 * grid.dim()) {}

void EnergyLedger::record(const State& s) {
  if (!samples_.empty() && !(s.t > samples_.back().t)) {
    throw ContractViolation("energy ledger times must increase");
  }
  const auto norm = [&](const auto& f, double sigma) { return lp::besov_norm(f, lp::BesovSpec{sigma}, cutoff_); };

  const double u_s1 = norm(s.u, s1_);
  const double tau_s1 = norm(s.tau, s1_);
  const double tau_half = norm(s.tau, half_n_);

  const VectorField phi = auxiliary(s, params_).phi;
  const auto [low, high] = lp::high_low_split(phi, n0_, cutoff_);
  const double integrand[3] = {norm(s.u, half_n_ + 1.0), norm(low, half_n_ + 1.0),
                               norm(high, half_n_ + 2.0 - params_.alpha)};

  EnergySample sample{};
  sample.t = s.t;
  sample.cancellation_residual = cancellation_residual(s.u, s.tau);
  if (samples_.empty()) {
    e0_ = u_s1 + 2.0 * tau_s1 + tau_half;
    sup_pair_ = u_s1 + tau_s1;
    sup_tau_ = tau_half;
  } else {
    const EnergySample& prev = samples_.back();
    const double dt = s.t - prev.t;
    sup_pair_ = std::max(sup_pair_, u_s1 + tau_s1);
    sup_tau_ = std::max(sup_tau_, tau_half);
    sample.e2_u_int = prev.e2_u_int + 0.5 * dt * (last_[0] + integrand[0]);
    sample.e2_phi_low_int = prev.e2_phi_low_int + 0.5 * dt * (last_[1] + integrand[1]);
    sample.e2_phi_high_int = prev.e2_phi_high_int + 0.5 * dt * (last_[2] + integrand[2]);
  }
  std::copy(std::begin(integrand), std::end(integrand), last_);
  sample.e1 = sup_pair_ + sup_tau_;
  samples_.push_back(sample);
}

double EnergyLedger::fitted_constant() const {
  double c = 0.0;
  for (const auto& s : samples_) {
    const double e = s.total();
    if (e == 0.0) continue;
    c = std::max(c, e / (e0_ + e * e));
  }
  return c;
}

bool EnergyLedger::bootstrap_flag() const {
  if (samples_.empty()) return false;
  const double bound = 2.0 * samples_.front().e1;
  return std::any_of(samples_.begin(), samples_.end(), [&](const EnergySample& s) { return s.e1 > bound; });
}

void EnergyLedger::write_csv(std::ostream& out) const {
  out << "t,E1,E2_u_int,E2_phi_low_int,E2_phi_high_int,cancellation_residual\n";
  for (const auto& s : samples_) {
    out << csv_row({format_number(s.t), format_number(s.e1), format_number(s.e2_u_int),
                    format_number(s.e2_phi_low_int), format_number(s.e2_phi_high_int),
                    format_number(s.cancellation_residual)});
  }
}

}  // namespace oldroyd
