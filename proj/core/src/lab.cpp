#include "oldroyd/lab.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "oldroyd/errors.hpp"
#include "oldroyd/operators.hpp"
#include "oldroyd/parallel.hpp"

namespace oldroyd::lab {

namespace {

void require_solenoidal(const VectorField& u) {
  if (max_divergence(u) > 1e-10) throw ContractViolation("commutator estimates need a divergence-free advecting field");
}

template <class Shape>
Field<Shape> without_mean(Field<Shape> f) {
  for (int c = 0; c < f.components(); ++c) f.coefficients(c)[0] = 0.0;
  return f;
}

double safe_ratio(double lhs, double rhs) {
  if (lhs == 0.0) return 0.0;
  return rhs == 0.0 ? std::numeric_limits<double>::infinity() : lhs / rhs;
}

double half_dim(const Grid& g) { return 0.5 * g.dim(); }

}  // namespace

VectorField commutator_lambda(const VectorField& u, const VectorField& v, double s) {
  require_solenoidal(u);
  if (!has_zero_mean(u) || !has_zero_mean(v)) throw ContractViolation("commutator inputs must be mean-zero");
  // ∫u·∇v = 0 for solenoidal u, so the mean of the product is pure roundoff.
  const VectorField adv = without_mean(advect(u, v));
  return without_mean(fractional_laplacian(adv, s) - advect(u, fractional_laplacian(v, s)));
}

Ratio besov_commutator_ratio(const VectorField& u, const VectorField& v, double s) {
  const int n = u.dim();
  if (!(s >= -1.0 && s < n + 1.0)) throw ContractViolation("Besov commutator exponent outside [-1, n+1)");
  const auto cutoff = lp::DyadicCutoff::for_grid(u.grid());
  const double nh = half_dim(u.grid());
  Ratio r;
  r.lhs = lp::besov_norm(commutator_lambda(u, v, s), lp::BesovSpec{nh - s}, cutoff);
  r.rhs = lp::besov_norm(gradient(u), lp::BesovSpec{nh}, cutoff) * lp::besov_norm(v, lp::BesovSpec{nh}, cutoff);
  r.ratio = safe_ratio(r.lhs, r.rhs);
  return r;
}

BlockCommutatorReport block_commutator_check(const VectorField& u, const VectorField& v, double s,
                                    const lp::DyadicCutoff& cutoff) {
  const double nh = half_dim(u.grid());
  if (!(s > -1.0 - nh && s <= 1.0 + nh)) throw ContractViolation("block commutator exponent outside (-1-n/2, 1+n/2]");
  require_solenoidal(u);
  BlockCommutatorReport report;
  const VectorField adv = advect(u, v);
  for (int j = cutoff.j_min(); j <= cutoff.j_max(); ++j) {
    const auto block = lp::dyadic_block(adv, j, cutoff).field - advect(u, lp::dyadic_block(v, j, cutoff).field);
    const double w = std::pow(2.0, j * s) * norm_l2(block);
    report.ledger.push_back({j, w});
    report.summed.lhs += w;
  }
  report.summed.rhs =
      lp::besov_norm(gradient(u), lp::BesovSpec{nh}, cutoff) * lp::besov_norm(v, lp::BesovSpec{s}, cutoff);
  report.summed.ratio = safe_ratio(report.summed.lhs, report.summed.rhs);
  return report;
}

BlockCommutatorReport block_commutator_check(const VectorField& u, const VectorField& v, double s) {
  return block_commutator_check(u, v, s, lp::DyadicCutoff::for_grid(u.grid()));
}

Ratio kato_ponce_ratio(const VectorField& u, const VectorField& v, double s) {
  if (!(s >= 0.0)) throw ContractViolation("Kato-Ponce exponent must be non-negative");
  const VectorField comm = bessel_potential(advect(u, v), s) - advect(u, bessel_potential(v, s));
  const TensorField grad_u = gradient(u);
  const TensorField grad_v = gradient(v);
  Ratio r;
  r.lhs = norm_l2(comm);
  r.rhs = max_abs(grad_u) * norm_l2(bessel_potential(grad_v, s - 1.0)) +
          max_abs(grad_v) * norm_l2(bessel_potential(u, s));
  r.ratio = safe_ratio(r.lhs, r.rhs);
  return r;
}

BonyPieces bony_decomposition(const ScalarField& u, const ScalarField& v, const lp::DyadicCutoff& cutoff) {
  const Grid& g = u.grid();
  const std::size_t points = g.physical_points();
  const int bands = cutoff.j_max() - cutoff.j_min() + 1;

  std::vector<std::vector<double>> du(bands), dv(bands);
  for (int b = 0; b < bands; ++b) {
    const int j = cutoff.j_min() + b;
    const auto pu = to_physical(lp::dyadic_block(u, j, cutoff).field);
    const auto pv = to_physical(lp::dyadic_block(v, j, cutoff).field);
    du[b].assign(pu.values(0).begin(), pu.values(0).end());
    dv[b].assign(pv.values(0).begin(), pv.values(0).end());
  }

  BonyPieces out{ScalarField(g, Representation::physical), ScalarField(g, Representation::physical),
                 ScalarField(g, Representation::physical), ScalarField(g, Representation::physical), 0.0};
  auto tuv = out.paraproduct_uv.values(0);
  auto tvu = out.paraproduct_vu.values(0);
  auto rem = out.remainder.values(0);
  std::vector<double> low_u(points, 0.0), low_v(points, 0.0);
  // Ṡ_{j-1} = Σ_{j' <= j-2} Δ̇_j', accumulated as j increases.
  for (int b = 0; b < bands; ++b) {
    if (b >= 2) {
      for (std::size_t p = 0; p < points; ++p) {
        low_u[p] += du[b - 2][p];
        low_v[p] += dv[b - 2][p];
      }
    }
    for (std::size_t p = 0; p < points; ++p) {
      tuv[p] += low_u[p] * dv[b][p];
      tvu[p] += low_v[p] * du[b][p];
      double near = dv[b][p];
      if (b > 0) near += dv[b - 1][p];
      if (b + 1 < bands) near += dv[b + 1][p];
      rem[p] += du[b][p] * near;
    }
  }

  const auto fu = to_physical(u);
  const auto fv = to_physical(v);
  const auto pu = fu.values(0);
  const auto pv = fv.values(0);
  auto prod = out.product.values(0);
  double num = 0.0, den = 0.0;
  for (std::size_t p = 0; p < points; ++p) {
    prod[p] = pu[p] * pv[p];
    const double diff = prod[p] - (tuv[p] + tvu[p] + rem[p]);
    num += diff * diff;
    den += prod[p] * prod[p];
  }
  out.residual = den == 0.0 ? (num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity()) : std::sqrt(num / den);
  return out;
}

double bony_check(const ScalarField& u, const ScalarField& v) {
  return bony_decomposition(u, v, lp::DyadicCutoff::for_grid(u.grid())).residual;
}

std::string_view to_string(Inequality k) {
  switch (k) {
    case Inequality::besov_commutator: return "besov_commutator";
    case Inequality::block_commutator: return "block_commutator";
    case Inequality::kato_ponce: return "kato_ponce";
  }
  return "unknown";
}

Inequality parse_inequality(std::string_view name) {
  for (auto k : {Inequality::besov_commutator, Inequality::block_commutator, Inequality::kato_ponce}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown inequality '" + std::string(name) + "'", "ensemble.inequality");
}

void EnsembleSpec::validate() const {
  if (seeds.empty()) throw ConfigError("at least one seed is required", "ensemble.seeds");
  if (s_values.empty()) throw ConfigError("at least one exponent is required", "ensemble.s_values");
  if (!(field_band.k_min >= 1.0 && field_band.k_min <= field_band.k_max)) {
    throw ConfigError("band must satisfy 1 <= k_min <= k_max", "ensemble.band");
  }
  if (!(field_band.k_max < grid.dealias_cutoff())) {
    throw ConfigError("band reaches past the dealiasing cutoff", "ensemble.band");
  }
  const double n = grid.dim();
  for (double s : s_values) {
    bool ok = true;
    switch (inequality) {
      case Inequality::besov_commutator: ok = s >= -1.0 && s < n + 1.0; break;
      case Inequality::block_commutator: ok = s > -1.0 - n / 2 && s <= 1.0 + n / 2; break;
      case Inequality::kato_ponce: ok = s >= 0.0; break;
    }
    if (!ok || !std::isfinite(s)) throw ConfigError("exponent outside the admissible range", "ensemble.s_values");
  }
}

std::pair<VectorField, VectorField> ensemble_pair(const EnsembleSpec& spec, std::uint64_t seed) {
  // Distinct streams for u and v derived from one seed.
  return {random_divfree_field(spec.grid, 2 * seed, spec.spectrum_slope, spec.field_band),
          random_vector_field(spec.grid, 2 * seed + 1, spec.spectrum_slope, spec.field_band)};
}

InequalityReport run_ensemble(const EnsembleSpec& spec, int workers) {
  spec.validate();
  const std::size_t ns = spec.s_values.size();
  const std::size_t nseed = spec.seeds.size();
  InequalityReport report;
  report.samples.resize(ns * nseed);

  // One task per seed: the pair is built once and every exponent evaluated.
  const auto task = [&](std::size_t i) {
    const auto seed = spec.seeds[i];
    const auto [u, v] = ensemble_pair(spec, seed);
    for (std::size_t k = 0; k < ns; ++k) {
      const double s = spec.s_values[k];
      Ratio r;
      switch (spec.inequality) {
        case Inequality::besov_commutator: r = besov_commutator_ratio(u, v, s); break;
        case Inequality::block_commutator: r = block_commutator_check(u, v, s).summed; break;
        case Inequality::kato_ponce: r = kato_ponce_ratio(u, v, s); break;
      }
      report.samples[k * nseed + i] = {seed, s, r.lhs, r.rhs, r.ratio};
    }
  };

  parallel_for(nseed, workers, task);

  report.max_ratio.assign(ns, 0.0);
  for (std::size_t k = 0; k < ns; ++k) {
    for (std::size_t i = 0; i < nseed; ++i) {
      const double r = report.samples[k * nseed + i].ratio;
      if (!std::isfinite(r)) report.all_finite = false;
      report.max_ratio[k] = std::max(report.max_ratio[k], r);
    }
  }
  return report;
}

double refinement_change(const InequalityReport& coarse, const InequalityReport& fine) {
  if (coarse.max_ratio.size() != fine.max_ratio.size()) {
    throw ContractViolation("reports cover different exponent lists");
  }
  double worst = 0.0;
  for (std::size_t k = 0; k < coarse.max_ratio.size(); ++k) {
    const double a = coarse.max_ratio[k];
    const double b = fine.max_ratio[k];
    const double top = std::max(a, b);
    if (top > 0.0) worst = std::max(worst, std::abs(a - b) / top);
  }
  return worst;
}

}  // namespace oldroyd::lab
