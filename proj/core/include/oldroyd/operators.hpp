#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "oldroyd/errors.hpp"
#include "oldroyd/fft.hpp"
#include "oldroyd/field.hpp"

namespace oldroyd {

namespace detail {

/// out = i k_axis * in (Nyquist component zeroed).
void differentiate(const Grid& grid, std::span<const Complex> in, int axis, std::span<Complex> out);

double weighted_mode_sum(const Grid& grid, std::span<const Complex> a, std::span<const Complex> b);

}  // namespace detail

/// Multiplies every stored mode of every component by `multiplier(mode)`.
template <class Shape, class Multiplier>
Field<Shape> apply_multiplier(const Field<Shape>& f, Multiplier&& multiplier) {
  f.require(Representation::spectral);
  Field<Shape> out = f;
  const std::size_t count = f.grid().spectral_modes();
  for (int c = 0; c < out.components(); ++c) {
    auto coeffs = out.coefficients(c);
    for (std::size_t m = 0; m < count; ++m) coeffs[m] *= multiplier(m);
  }
  return out;
}

/// True when the spatial mean of every component is negligible relative to
/// the field's size.
template <class Shape>
bool has_zero_mean(const Field<Shape>& f, double rel_tol = 1e-12) {
  const auto& g = f.grid();
  for (int c = 0; c < f.components(); ++c) {
    double mean = 0.0;
    double scale = 0.0;
    if (f.is_spectral()) {
      const auto coeffs = f.coefficients(c);
      const auto points = static_cast<double>(g.physical_points());
      mean = std::abs(coeffs[0]) / points;
      scale = std::sqrt(std::max(0.0, detail::weighted_mode_sum(g, coeffs, coeffs))) / points;
    } else {
      double sum = 0.0;
      double sq = 0.0;
      for (double v : f.values(c)) {
        sum += v;
        sq += v * v;
      }
      const auto points = static_cast<double>(g.physical_points());
      mean = std::abs(sum) / points;
      scale = std::sqrt(sq / points);
    }
    if (mean > rel_tol * scale && mean > 0.0) return false;
  }
  return true;
}

/// Λ^s f, the Fourier multiplier |k|^s. s < 0 requires a mean-zero field.
template <class Shape>
Field<Shape> fractional_laplacian(const Field<Shape>& f, double s) {
  f.require(Representation::spectral);
  if (s == 0.0) return f;
  if (s < 0.0 && !has_zero_mean(f)) {
    throw ContractViolation("negative power of Λ applied to a field with nonzero mean");
  }
  const auto& mag = modes(f.grid()).magnitude;
  return apply_multiplier(f, [&](std::size_t m) { return m == 0 ? 0.0 : std::pow(mag[m], s); });
}

/// J^s f, the multiplier (1 + |k|²)^{s/2}.
template <class Shape>
Field<Shape> bessel_potential(const Field<Shape>& f, double s) {
  const auto& mag = modes(f.grid()).magnitude;
  return apply_multiplier(f, [&](std::size_t m) { return std::pow(1.0 + mag[m] * mag[m], 0.5 * s); });
}

/// Zeroes every mode with some |k_i| above the grid's dealiasing cutoff.
template <class Shape>
Field<Shape> dealias(const Field<Shape>& f) {
  const auto& keep = modes(f.grid()).retained;
  return apply_multiplier(f, [&](std::size_t m) { return keep[m] ? 1.0 : 0.0; });
}

/// ℙ = I - ∇Δ^{-1}div, applied per mode.
VectorField leray_project(const VectorField& v);

/// (∇u)_{ij} = ∂_j u_i, spectral in and out.
TensorField gradient(const VectorField& u);
VectorField gradient(const ScalarField& p);

ScalarField divergence(const VectorField& v);
/// (div τ)_i = Σ_j ∂_j τ_ij.
VectorField divergence(const SymTensorField& tau);

/// D(u) = (∇u + ∇uᵀ)/2.
SymTensorField deformation(const VectorField& u);
/// Ω(u) = (∇u - ∇uᵀ)/2.
TensorField vorticity(const VectorField& u);

SymTensorField symmetric_part(const TensorField& a);
TensorField antisymmetric_part(const TensorField& a);

/// Q(τ, ∇u) = τΩ - Ωτ + b(Dτ + τD), evaluated pointwise on physical fields.
SymTensorField q_bilinear(const SymTensorField& tau, const TensorField& grad_u, double b);

/// Pointwise product Σ_j u_j g_{c,j} for each component c of a field whose
/// physical gradient components are supplied in `grad` (component-major,
/// dim entries per component). Used by the advection routines.
void contract_velocity(std::span<const double> u_phys, std::span<const double> grad,
                       int components, std::size_t points, int dim, std::span<double> out);

/// u·∇f with the product formed in physical space and the result dealiased.
/// `u` may be in either representation; `f` must be spectral.
template <class Shape>
Field<Shape> advect(const VectorField& u, const Field<Shape>& f) {
  f.require(Representation::spectral);
  const Grid& g = f.grid();
  const VectorField u_phys = as_physical(u);
  const int dim = g.dim();
  const std::size_t points = g.physical_points();
  const int comps = f.components();

  std::vector<double> grad(static_cast<std::size_t>(comps) * dim * points);
  std::vector<Complex> work(g.spectral_modes());
  for (int c = 0; c < comps; ++c) {
    for (int a = 0; a < dim; ++a) {
      detail::differentiate(g, f.coefficients(c), a, work);
      fft::inverse(g, work, std::span(grad).subspan((c * dim + a) * points, points));
    }
  }
  Field<Shape> product(g, Representation::physical);
  contract_velocity(u_phys.all_values(), grad, comps, points, dim, product.all_values());
  return dealias(to_spectral(product));
}

/// Torus L² inner product (Frobenius for tensors), either representation.
template <class Shape>
double inner_l2(const Field<Shape>& f, const Field<Shape>& g) {
  if (!(f.grid() == g.grid()) || f.representation() != g.representation()) {
    throw ContractViolation("inner product of fields with different grid or representation");
  }
  const Grid& grid = f.grid();
  double total = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    double part = 0.0;
    if (f.is_spectral()) {
      part = detail::weighted_mode_sum(grid, f.coefficients(c), g.coefficients(c)) *
             fft::parseval_factor(grid);
    } else {
      const auto a = f.values(c);
      const auto b = g.values(c);
      for (std::size_t i = 0; i < a.size(); ++i) part += a[i] * b[i];
      part *= grid.volume() / static_cast<double>(grid.physical_points());
    }
    total += f.weight(c) * part;
  }
  return total;
}

template <class Shape>
double norm_l2(const Field<Shape>& f) {
  return std::sqrt(std::max(0.0, inner_l2(f, f)));
}

/// Grid maximum of the pointwise (Frobenius) magnitude.
template <class Shape>
double max_abs(const Field<Shape>& f) {
  const Field<Shape> p = as_physical(f);
  const std::size_t points = f.grid().physical_points();
  double best = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    double sq = 0.0;
    for (int c = 0; c < p.components(); ++c) {
      const double v = p.values(c)[i];
      sq += p.weight(c) * v * v;
    }
    best = std::max(best, sq);
  }
  return std::sqrt(best);
}

/// Largest per-mode |div v̂| relative to the largest |v̂|.
double max_divergence(const VectorField& v);

}  // namespace oldroyd
