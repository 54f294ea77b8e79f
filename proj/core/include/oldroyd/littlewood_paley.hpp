#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "oldroyd/errors.hpp"
#include "oldroyd/field.hpp"
#include "oldroyd/operators.hpp"

namespace oldroyd::lp {

/// Smooth dyadic partition of unity on the grid's frequency lattice.
///
/// chi(r) is 1 for r <= 3/4, 0 for r >= 4/3 and non-increasing in between;
/// phi(r) = chi(r/2) - chi(r) is supported in 3/4 <= r <= 8/3. Block j uses
/// phi(2^{-j}|k|). Only bands j_min..j_max are represented; modes outside
/// [0.75 * 2^j_min, 0.75 * 2^j_max] sit in edge bands where the partition
/// may not sum to one.
class DyadicCutoff {
 public:
  DyadicCutoff(int j_min, int j_max);

  /// j_min = -2, j_max = ceil(log2(size/2)).
  static DyadicCutoff for_grid(const Grid& grid);

  static double chi(double r);
  static double phi(double r) { return chi(0.5 * r) - chi(r); }

  int j_min() const noexcept { return j_min_; }
  int j_max() const noexcept { return j_max_; }
  bool contains(int j) const noexcept { return j >= j_min_ && j <= j_max_; }

  double block_weight(int j, double magnitude) const {
    return contains(j) ? phi(std::ldexp(magnitude, -j)) : 0.0;
  }
  /// Weight of Ṡ_j = Σ_{j_min <= j' < j} Δ̇_j' at |k| = magnitude.
  double low_pass_weight(int j, double magnitude) const;

  double safe_lower() const noexcept { return 0.75 * std::ldexp(1.0, j_min_); }
  double safe_upper() const noexcept { return 0.75 * std::ldexp(1.0, j_max_); }

 private:
  int j_min_;
  int j_max_;
};

enum class NormKind { homogeneous_besov, sobolev };

/// Ḃ^s_{2,1} (or H^s when kind is sobolev). p = 2 and r = 1 are fixed.
struct BesovSpec {
  double s = 0.0;
  NormKind kind = NormKind::homogeneous_besov;
};

template <class Shape>
struct Block {
  Field<Shape> field;
  /// Set when the requested band lies outside the cutoff's range (field is zero).
  bool outside_range = false;
};

/// Δ̇_j f.
template <class Shape>
Block<Shape> dyadic_block(const Field<Shape>& f, int j, const DyadicCutoff& cutoff) {
  f.require(Representation::spectral);
  if (!cutoff.contains(j)) return {Field<Shape>(f.grid(), Representation::spectral), true};
  const auto& mag = modes(f.grid()).magnitude;
  return {apply_multiplier(f, [&](std::size_t m) { return cutoff.block_weight(j, mag[m]); }), false};
}

template <class Shape>
Block<Shape> dyadic_block(const Field<Shape>& f, int j) {
  return dyadic_block(f, j, DyadicCutoff::for_grid(f.grid()));
}

/// Ṡ_j f.
template <class Shape>
Field<Shape> low_pass(const Field<Shape>& f, int j, const DyadicCutoff& cutoff) {
  f.require(Representation::spectral);
  const auto& mag = modes(f.grid()).magnitude;
  return apply_multiplier(f, [&](std::size_t m) { return cutoff.low_pass_weight(j, mag[m]); });
}

template <class Shape>
Field<Shape> low_pass(const Field<Shape>& f, int j) {
  return low_pass(f, j, DyadicCutoff::for_grid(f.grid()));
}

/// ‖Δ̇_j f‖_{L²} for j = j_min..j_max, computed in one pass over the modes.
template <class Shape>
std::vector<double> block_norms(const Field<Shape>& f, const DyadicCutoff& cutoff) {
  f.require(Representation::spectral);
  const Grid& g = f.grid();
  const auto& table = modes(g);
  const int bands = cutoff.j_max() - cutoff.j_min() + 1;
  std::vector<double> energy(bands, 0.0);
  for (int c = 0; c < f.components(); ++c) {
    const auto coeffs = f.coefficients(c);
    const double w = f.weight(c);
    for (std::size_t m = 1; m < coeffs.size(); ++m) {
      const double a2 = std::norm(coeffs[m]);
      if (a2 == 0.0) continue;
      for (int b = 0; b < bands; ++b) {
        const double phi = cutoff.block_weight(cutoff.j_min() + b, table.magnitude[m]);
        if (phi != 0.0) energy[b] += w * table.multiplicity[m] * phi * phi * a2;
      }
    }
  }
  const double factor = fft::parseval_factor(g);
  for (auto& e : energy) e = std::sqrt(e * factor);
  return energy;
}

struct LedgerEntry {
  int j;
  /// 2^{js} ‖Δ̇_j f‖_{L²}
  double weighted;
};

template <class Shape>
std::vector<LedgerEntry> besov_ledger(const Field<Shape>& f, double s, const DyadicCutoff& cutoff) {
  const auto norms = block_norms(f, cutoff);
  std::vector<LedgerEntry> out;
  out.reserve(norms.size());
  for (std::size_t b = 0; b < norms.size(); ++b) {
    const int j = cutoff.j_min() + static_cast<int>(b);
    out.push_back({j, std::pow(2.0, j * s) * norms[b]});
  }
  return out;
}

/// ‖f‖_{H^s} = ‖J^s f‖_{L²}.
template <class Shape>
double sobolev_norm(const Field<Shape>& f, double s) {
  const Field<Shape> spec = as_spectral(f);
  if (s == 0.0) return norm_l2(spec);
  return norm_l2(bessel_potential(spec, s));
}

/// Σ_j 2^{js}‖Δ̇_j f‖_{L²} over the cutoff's bands; requires a mean-zero field.
template <class Shape>
double besov_norm(const Field<Shape>& f, BesovSpec spec, const DyadicCutoff& cutoff) {
  if (spec.kind == NormKind::sobolev) return sobolev_norm(f, spec.s);
  const Field<Shape> g = as_spectral(f);
  if (!has_zero_mean(g)) {
    throw ContractViolation("homogeneous Besov norm of a field with nonzero mean");
  }
  double total = 0.0;
  for (const auto& e : besov_ledger(g, spec.s, cutoff)) total += e.weighted;
  return total;
}

template <class Shape>
double besov_norm(const Field<Shape>& f, double s) {
  return besov_norm(f, BesovSpec{s}, DyadicCutoff::for_grid(f.grid()));
}

/// (f^ℓ, f^h): blocks j <= n0 and the rest; f^ℓ + f^h == f.
template <class Shape>
std::pair<Field<Shape>, Field<Shape>> high_low_split(const Field<Shape>& f, int n0,
                                                     const DyadicCutoff& cutoff) {
  f.require(Representation::spectral);
  if (n0 >= cutoff.j_max()) return {f, Field<Shape>(f.grid(), Representation::spectral)};
  if (n0 < cutoff.j_min()) return {Field<Shape>(f.grid(), Representation::spectral), f};
  Field<Shape> low = low_pass(f, n0 + 1, cutoff);
  Field<Shape> high = f - low;
  return {std::move(low), std::move(high)};
}

template <class Shape>
std::pair<Field<Shape>, Field<Shape>> high_low_split(const Field<Shape>& f, int n0) {
  return high_low_split(f, n0, DyadicCutoff::for_grid(f.grid()));
}

/// Time norm of a sampled series with uniform spacing dt: trapezoid rule for
/// finite q, maximum for q = ∞.
double time_norm(std::span<const double> series, double dt, double q);

/// Chemin–Lerner norm Σ_j 2^{js} ‖ ‖Δ̇_j f(t)‖_{L²} ‖_{L^q(0,T)} of a trajectory
/// sampled at uniform spacing dt.
template <class Shape>
double chemin_lerner_norm(std::span<const Field<Shape>> trajectory, double dt, double s, double q,
                          const DyadicCutoff& cutoff) {
  if (trajectory.empty()) return 0.0;
  const int bands = cutoff.j_max() - cutoff.j_min() + 1;
  std::vector<std::vector<double>> per_band(bands, std::vector<double>(trajectory.size()));
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const auto norms = block_norms(as_spectral(trajectory[t]), cutoff);
    for (int b = 0; b < bands; ++b) per_band[b][t] = norms[b];
  }
  double total = 0.0;
  for (int b = 0; b < bands; ++b) {
    total += std::pow(2.0, (cutoff.j_min() + b) * s) * time_norm(per_band[b], dt, q);
  }
  return total;
}

/// ‖ ‖f(t)‖_{Ḃ^s_{2,1}} ‖_{L^q(0,T)}, the ordinary time-space norm.
template <class Shape>
double lebesgue_besov_norm(std::span<const Field<Shape>> trajectory, double dt, double s, double q,
                           const DyadicCutoff& cutoff) {
  std::vector<double> series;
  series.reserve(trajectory.size());
  for (const auto& f : trajectory) series.push_back(besov_norm(f, BesovSpec{s}, cutoff));
  return time_norm(series, dt, q);
}

enum class BernsteinDirection { upper, lower };

namespace detail {
/// Largest ‖∂^α f‖_{L²} over multi-indices |α| = order, for one field's coefficients.
double max_derivative_norm(const Grid& grid, std::span<const std::span<const Complex>> components,
                           std::span<const double> weights, int order);
}  // namespace detail

/// For f spectrally localized near 2^j: upper gives sup_{|α|=order}‖∂^α f‖ / (2^{j·order}‖f‖),
/// lower its reciprocal. Both should stay within [1/C, C] uniformly in j.
template <class Shape>
double bernstein_ratio(const Field<Shape>& f, int j, int order, BernsteinDirection direction) {
  const Field<Shape> g = as_spectral(f);
  std::vector<std::span<const Complex>> comps;
  std::vector<double> weights;
  for (int c = 0; c < g.components(); ++c) {
    comps.push_back(g.coefficients(c));
    weights.push_back(g.weight(c));
  }
  const double top = detail::max_derivative_norm(g.grid(), comps, weights, order);
  const double base = std::ldexp(norm_l2(g), j * order);
  if (base == 0.0 || top == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return direction == BernsteinDirection::upper ? top / base : base / top;
}

}  // namespace oldroyd::lp
