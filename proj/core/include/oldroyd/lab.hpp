#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "oldroyd/littlewood_paley.hpp"
#include "oldroyd/random_fields.hpp"

namespace oldroyd::lab {

/// [Λ^s, u·∇]v = Λ^s(u·∇v) - u·∇Λ^s v with dealiased products.
/// u must be divergence-free; u and v mean-zero.
VectorField commutator_lambda(const VectorField& u, const VectorField& v, double s);

/// ‖[Λ^s,u·∇]v‖_{Ḃ^{n/2-s}} / (‖∇u‖_{Ḃ^{n/2}} ‖v‖_{Ḃ^{n/2}}), s in [-1, n+1).
struct Ratio {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};
Ratio besov_commutator_ratio(const VectorField& u, const VectorField& v, double s);

struct BlockCommutatorReport {
  /// 2^{js}‖[Δ̇_j, u·∇]v‖_{L²} per band.
  std::vector<lp::LedgerEntry> ledger;
  Ratio summed;  // lhs = Σ_j ledger, rhs = ‖∇u‖_{Ḃ^{n/2}}‖v‖_{Ḃ^s}
};

/// Block commutator bookkeeping for -1-n/2 < s <= 1+n/2.
BlockCommutatorReport block_commutator_check(const VectorField& u, const VectorField& v, double s);
BlockCommutatorReport block_commutator_check(const VectorField& u, const VectorField& v, double s,
                                    const lp::DyadicCutoff& cutoff);

/// ‖J^s(u·∇v) - u·∇J^s v‖ / (‖∇u‖_∞‖J^{s-1}∇v‖ + ‖∇v‖_∞‖J^s u‖), s >= 0.
/// L^∞ norms are grid maxima of the pointwise Frobenius magnitude.
Ratio kato_ponce_ratio(const VectorField& u, const VectorField& v, double s);

struct BonyPieces {
  ScalarField product;      // uv
  ScalarField paraproduct_uv;  // Σ_j Ṡ_{j-1}u Δ̇_j v
  ScalarField paraproduct_vu;  // Σ_j Ṡ_{j-1}v Δ̇_j u
  ScalarField remainder;    // Σ_{|j-j'|<=1} Δ̇_j u Δ̇_j' v
  double residual = 0.0;    // ‖uv - (T_u v + T_v u + R)‖ / ‖uv‖
};

/// Bony decomposition over the cutoff's bands; all pieces are physical
/// pointwise products.
BonyPieces bony_decomposition(const ScalarField& u, const ScalarField& v, const lp::DyadicCutoff& cutoff);
double bony_check(const ScalarField& u, const ScalarField& v);

enum class Inequality { besov_commutator, block_commutator, kato_ponce };

std::string_view to_string(Inequality k);
Inequality parse_inequality(std::string_view name);

struct EnsembleSpec {
  std::vector<std::uint64_t> seeds;
  Grid grid{2, 64};
  Band field_band{1.0, 8.0};
  double spectrum_slope = -1.0;
  std::vector<double> s_values;
  Inequality inequality = Inequality::besov_commutator;

  /// Throws ConfigError if the spec is empty or an exponent lies outside the
  /// admissible range of the selected inequality.
  void validate() const;
};

struct Sample {
  std::uint64_t seed;
  double s;
  double lhs;
  double rhs;
  double ratio;
};

struct InequalityReport {
  /// Ordered by (s as listed, seed as listed) regardless of execution order.
  std::vector<Sample> samples;
  /// Per entry of s_values.
  std::vector<double> max_ratio;
  bool all_finite = true;
};

/// The (u, v) pair used for `seed`: u divergence-free, v a general mean-zero vector field.
std::pair<VectorField, VectorField> ensemble_pair(const EnsembleSpec& spec, std::uint64_t seed);

/// Evaluates the selected inequality on every (s, seed) pair using up to
/// `workers` threads.
InequalityReport run_ensemble(const EnsembleSpec& spec, int workers = 1);

/// max over s of |a - b| / max(a, b) between two reports of the same shape.
double refinement_change(const InequalityReport& coarse, const InequalityReport& fine);

}  // namespace oldroyd::lab
