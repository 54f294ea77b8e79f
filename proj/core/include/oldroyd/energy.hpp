#pragma once

#include <iosfwd>
#include <vector>

#include "oldroyd/dynamics.hpp"
#include "oldroyd/littlewood_paley.hpp"

namespace oldroyd {

struct EnergySample {
  double t;
  /// Running maxima make up E1; the instantaneous parts are kept for inspection.
  double e1;
  double e2_u_int;
  double e2_phi_low_int;
  double e2_phi_high_int;
  double cancellation_residual;

  double e2() const { return e2_u_int + e2_phi_low_int + e2_phi_high_int; }
  double total() const { return e1 + e2(); }
};

/// Energy functionals of the global small-data argument, sampled at the
/// output cadence. With s1 = n/2 + 1 - α:
///   E0 = ‖u0‖_{s1} + ‖τ0‖_{s1} + ‖τ0‖_{n/2} + ‖τ0‖_{s1}
///   E1 = sup_t(‖u‖_{s1} + ‖τ‖_{s1}) + sup_t ‖τ‖_{n/2}
///   E2 = ∫‖u‖_{n/2+1} + ∫‖φ^ℓ‖_{n/2+1} + ∫‖φ^h‖_{n/2+2-α}
/// All norms are Ḃ^s_{2,1}; φ = Λ^{-1}ℙdiv τ split at band N0; sup and ∫ are
/// a running max and a trapezoid sum over the recorded times.
class EnergyLedger {
 public:
  EnergyLedger(const Grid& grid, const ModelParams& params);

  /// Appends a sample; times must increase strictly.
  void record(const State& s);

  int n0() const noexcept { return n0_; }
  double e0() const noexcept { return e0_; }
  const std::vector<EnergySample>& samples() const noexcept { return samples_; }
  bool empty() const noexcept { return samples_.empty(); }

  /// Smallest C with E(t) <= C·E0 + C·E(t)² at every sample (0 when E vanishes).
  double fitted_constant() const;
  /// True if E1 ever exceeded twice its first recorded value.
  bool bootstrap_flag() const;

  void write_csv(std::ostream& out) const;

 private:
  lp::DyadicCutoff cutoff_;
  ModelParams params_;
  int n0_;
  double s1_;
  double half_n_;
  double e0_ = 0.0;
  double sup_pair_ = 0.0;
  double sup_tau_ = 0.0;
  double last_[3] = {0.0, 0.0, 0.0};
  std::vector<EnergySample> samples_;
};

}  // namespace oldroyd
