#pragma once

#include <string>
#include <string_view>

#include "oldroyd/field.hpp"
#include "oldroyd/grid.hpp"

namespace oldroyd {

/// Which linear terms accompany the transport/coupling core.
///   generalized_no_damping: -ν Λ^α u, no stress diffusion, full Q.
///   viscous_diffusive:      -ν(-Δ)u, +Δτ, K1 = K2 = 1, no Q.
///   inviscid_diffusive:     no velocity dissipation, +Δτ, K1 = K2 = 1, no Q.
enum class Variant { generalized_no_damping, viscous_diffusive, inviscid_diffusive };

std::string_view to_string(Variant v);
/// Accepts the to_string spellings; throws ConfigError("model.variant") otherwise.
Variant parse_variant(std::string_view name);

struct ModelParams {
  double nu = 0.0;
  double alpha = 2.0;
  double k1 = 1.0;
  double k2 = 1.0;
  double b = 0.0;
  Variant variant = Variant::generalized_no_damping;

  /// Throws ConfigError keyed under "model." on inconsistent combinations.
  void validate() const;
  bool has_q() const noexcept { return variant == Variant::generalized_no_damping; }
  /// Decay rate of velocity mode |k| under the linear part (>= 0).
  double velocity_rate(double magnitude) const;
  /// Decay rate of stress mode |k| under the linear part (>= 0).
  double stress_rate(double magnitude) const;

  bool operator==(const ModelParams&) const = default;
};

struct State {
  VectorField u;
  SymTensorField tau;
  double t = 0.0;

  explicit State(const Grid& grid)
      : u(grid, Representation::spectral), tau(grid, Representation::spectral) {}
  State(VectorField u_, SymTensorField tau_, double t_ = 0.0)
      : u(std::move(u_)), tau(std::move(tau_)), t(t_) {}

  const Grid& grid() const { return u.grid(); }
  /// Throws ContractViolation unless both fields are spectral, mean-zero and u is solenoidal.
  void check(double div_tol = 1e-10) const;
  bool finite() const;
  bool identical(const State& o) const { return t == o.t && u.identical(o.u) && tau.identical(o.tau); }
};

struct Tendency {
  VectorField du;
  SymTensorField dtau;
};

/// The explicitly treated part: ℙ(-u·∇u + K1 div τ) and -u·∇τ - Q + K2 D(u).
Tendency explicit_terms(const State& s, const ModelParams& p);
/// Adds the linear dissipation to explicit_terms.
Tendency rhs(const State& s, const ModelParams& p);

struct AuxState {
  VectorField phi;  // Λ^{-1}ℙ div τ
  VectorField w;    // Λ^{α-1}φ - u
};

AuxState auxiliary(const State& s, const ModelParams& p);

struct Forcings {
  VectorField f;
  VectorField g;
  VectorField F;
};

/// f = -[Λ^{-1}ℙdiv, u·∇]τ - Λ^{-1}ℙdiv Q,  g = -[ℙ, u·∇]u,
/// F = -[Λ^{α-1}, u·∇]φ + Λ^{α-1}f - g.
Forcings forcings(const State& s, const ModelParams& p);

/// Physical Q(τ, ∇u) dealiased back to spectral; zero when the variant omits Q.
SymTensorField q_term(const State& s, const ModelParams& p);

/// Smallest band index j with 2^j >= 2^{1/(2(α-1))}; α must exceed 1.
int n0_threshold(double alpha);

/// max_j |⟨Δ̇_jℙdiv τ, Δ̇_j u⟩ + ⟨Δ̇_j D(u), Δ̇_j τ⟩| / (‖Δ̇_jτ‖‖Δ̇_ju‖ + guard).
double cancellation_residual(const VectorField& u, const SymTensorField& tau);

/// ½‖u‖²/K1 + ½‖τ‖²/K2.
double weighted_energy(const State& s, const ModelParams& p);
/// (ν/K1)‖Λ^{α/2}u‖² for generalized_no_damping (the matching quantity for the others).
double dissipation_rate(const State& s, const ModelParams& p);

}  // namespace oldroyd
