#include "oldroyd/dynamics.hpp"

#include <cmath>
#include <string>

#include "oldroyd/errors.hpp"
#include "oldroyd/fft.hpp"
#include "oldroyd/littlewood_paley.hpp"
#include "oldroyd/operators.hpp"

namespace oldroyd {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::generalized_no_damping: return "generalized_no_damping";
    case Variant::viscous_diffusive: return "viscous_diffusive";
    case Variant::inviscid_diffusive: return "inviscid_diffusive";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::generalized_no_damping, Variant::viscous_diffusive, Variant::inviscid_diffusive}) {
    if (to_string(v) == name) return v;
  }
  throw ConfigError("unknown variant '" + std::string(name) + "'", "model.variant");
}

void ModelParams::validate() const {
  if (!std::isfinite(nu) || nu < 0.0) throw ConfigError("must be a finite non-negative number", "model.nu");
  if (!(k1 > 0.0) || !std::isfinite(k1)) throw ConfigError("must be positive", "model.k1");
  if (!(k2 > 0.0) || !std::isfinite(k2)) throw ConfigError("must be positive", "model.k2");
  if (!std::isfinite(b)) throw ConfigError("must be finite", "model.b");
  switch (variant) {
    case Variant::generalized_no_damping:
      if (!(alpha > 1.0 && alpha <= 2.0)) throw ConfigError("must lie in (1, 2]", "model.alpha");
      if (!(nu > 0.0)) throw ConfigError("generalized_no_damping needs nu > 0", "model.nu");
      break;
    case Variant::inviscid_diffusive:
      if (nu != 0.0) throw ConfigError("inviscid_diffusive needs nu = 0", "model.nu");
      [[fallthrough]];
    case Variant::viscous_diffusive:
      if (k1 != 1.0) throw ConfigError("diffusive variants fix k1 = 1", "model.k1");
      if (k2 != 1.0) throw ConfigError("diffusive variants fix k2 = 1", "model.k2");
      if (b != 0.0) throw ConfigError("diffusive variants carry no Q term, b must be 0", "model.b");
      break;
  }
}

double ModelParams::velocity_rate(double magnitude) const {
  switch (variant) {
    case Variant::generalized_no_damping: return nu * std::pow(magnitude, alpha);
    case Variant::viscous_diffusive: return nu == 0.0 ? 0.0 : nu * magnitude * magnitude;
    case Variant::inviscid_diffusive: return 0.0;
  }
  return 0.0;
}

double ModelParams::stress_rate(double magnitude) const {
  return variant == Variant::generalized_no_damping ? 0.0 : magnitude * magnitude;
}

void State::check(double div_tol) const {
  u.require(Representation::spectral);
  tau.require(Representation::spectral);
  if (!has_zero_mean(u) || !has_zero_mean(tau)) throw ContractViolation("state fields must be mean-zero");
  if (max_divergence(u) > div_tol) throw ContractViolation("state velocity is not divergence-free");
}

bool State::finite() const {
  for (const auto& z : u.all_coefficients()) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  for (const auto& z : tau.all_coefficients()) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return std::isfinite(t);
}

namespace {

// ∇u in physical space, component (i, j) = ∂_j u_i.
TensorField physical_gradient(const VectorField& u) { return to_physical(gradient(u)); }

VectorField self_advection(const VectorField& u_phys, const TensorField& grad_phys) {
  const Grid& g = u_phys.grid();
  VectorField out(g, Representation::physical);
  contract_velocity(u_phys.all_values(), grad_phys.all_values(), g.dim(), g.physical_points(), g.dim(),
                    out.all_values());
  return dealias(to_spectral(out));
}

template <class Shape>
void remove_mean(Field<Shape>& f) {
  for (int c = 0; c < f.components(); ++c) f.coefficients(c)[0] = 0.0;
}

VectorField lambda_inv_pdiv(const SymTensorField& tau) {
  return fractional_laplacian(leray_project(divergence(tau)), -1.0);
}

}  // namespace

SymTensorField q_term(const State& s, const ModelParams& p) {
  if (!p.has_q()) return SymTensorField(s.grid(), Representation::spectral);
  return dealias(to_spectral(q_bilinear(to_physical(s.tau), physical_gradient(s.u), p.b)));
}

Tendency explicit_terms(const State& s, const ModelParams& p) {
  s.u.require(Representation::spectral);
  s.tau.require(Representation::spectral);
  const VectorField u_phys = to_physical(s.u);
  const TensorField grad_phys = physical_gradient(s.u);

  VectorField du = self_advection(u_phys, grad_phys);
  du *= -1.0;
  du.axpy(p.k1, divergence(s.tau));
  du = leray_project(du);

  SymTensorField dtau = advect(u_phys, s.tau);
  if (p.has_q()) dtau += dealias(to_spectral(q_bilinear(to_physical(s.tau), grad_phys, p.b)));
  dtau *= -1.0;
  dtau.axpy(p.k2, deformation(s.u));
  // Q has a nonzero spatial mean in general; the mean mode is held at zero so
  // that both fields stay in the homogeneous (mean-free) class on the torus.
  remove_mean(du);
  remove_mean(dtau);
  return {std::move(du), std::move(dtau)};
}

Tendency rhs(const State& s, const ModelParams& p) {
  Tendency out = explicit_terms(s, p);
  const auto& mag = modes(s.grid()).magnitude;
  for (int c = 0; c < out.du.components(); ++c) {
    auto dst = out.du.coefficients(c);
    const auto src = s.u.coefficients(c);
    for (std::size_t m = 0; m < dst.size(); ++m) {
      const double rate = p.velocity_rate(mag[m]);
      if (rate != 0.0) dst[m] -= rate * src[m];
    }
  }
  for (int c = 0; c < out.dtau.components(); ++c) {
    auto dst = out.dtau.coefficients(c);
    const auto src = s.tau.coefficients(c);
    for (std::size_t m = 0; m < dst.size(); ++m) {
      const double rate = p.stress_rate(mag[m]);
      if (rate != 0.0) dst[m] -= rate * src[m];
    }
  }
  return out;
}

AuxState auxiliary(const State& s, const ModelParams& p) {
  VectorField phi = lambda_inv_pdiv(s.tau);
  VectorField w = fractional_laplacian(phi, p.alpha - 1.0) - s.u;
  return {std::move(phi), std::move(w)};
}

Forcings forcings(const State& s, const ModelParams& p) {
  const VectorField u_phys = to_physical(s.u);
  const TensorField grad_phys = physical_gradient(s.u);
  const double lift = p.alpha - 1.0;

  const VectorField phi = lambda_inv_pdiv(s.tau);
  // [Λ^{-1}ℙdiv, u·∇]τ
  VectorField commutator_tau = lambda_inv_pdiv(advect(u_phys, s.tau)) - advect(u_phys, phi);
  VectorField f = lambda_inv_pdiv(q_term(s, p));
  f += commutator_tau;
  f *= -1.0;

  // -[ℙ, u·∇]u = u·∇u - ℙ(u·∇u); both sides materialized.
  const VectorField adv_u = self_advection(u_phys, grad_phys);
  VectorField g = adv_u - leray_project(adv_u);

  const VectorField commutator_phi =
      fractional_laplacian(advect(u_phys, phi), lift) - advect(u_phys, fractional_laplacian(phi, lift));
  VectorField F = fractional_laplacian(f, lift) - commutator_phi - g;
  return {std::move(f), std::move(g), std::move(F)};
}

int n0_threshold(double alpha) {
  if (!(alpha > 1.0)) throw ContractViolation("frequency threshold needs alpha > 1");
  return static_cast<int>(std::ceil(1.0 / (2.0 * (alpha - 1.0))));
}

double cancellation_residual(const VectorField& u, const SymTensorField& tau) {
  const Grid& g = u.grid();
  const auto cutoff = lp::DyadicCutoff::for_grid(g);
  const VectorField pdiv = leray_project(divergence(tau));
  const SymTensorField def = deformation(u);
  double worst = 0.0;
  for (int j = cutoff.j_min(); j <= cutoff.j_max(); ++j) {
    const auto uj = lp::dyadic_block(u, j, cutoff).field;
    const auto tj = lp::dyadic_block(tau, j, cutoff).field;
    const double scale = norm_l2(uj) * norm_l2(tj);
    if (scale == 0.0) continue;
    const double sum =
        inner_l2(lp::dyadic_block(pdiv, j, cutoff).field, uj) + inner_l2(lp::dyadic_block(def, j, cutoff).field, tj);
    worst = std::max(worst, std::abs(sum) / (scale + 1e-300));
  }
  return worst;
}

double weighted_energy(const State& s, const ModelParams& p) {
  return 0.5 * inner_l2(s.u, s.u) / p.k1 + 0.5 * inner_l2(s.tau, s.tau) / p.k2;
}

double dissipation_rate(const State& s, const ModelParams& p) {
  const auto& mag = modes(s.grid()).magnitude;
  // Σ rate(k)|f̂(k)|² in Parseval form, for both linear terms.
  const auto weighted = [&](const auto& f, auto&& rate) {
    const auto scaled = apply_multiplier(f, [&](std::size_t m) { return std::sqrt(rate(mag[m])); });
    return inner_l2(scaled, scaled);
  };
  double total = weighted(s.u, [&](double k) { return p.velocity_rate(k); }) / p.k1;
  if (p.variant != Variant::generalized_no_damping) {
    total += weighted(s.tau, [&](double k) { return p.stress_rate(k); }) / p.k2;
  }
  return total;
}

}  // namespace oldroyd
