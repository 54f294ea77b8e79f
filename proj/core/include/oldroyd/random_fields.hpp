#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "oldroyd/field.hpp"

namespace oldroyd {

/// Closed annulus k_min <= |k| <= k_max of integer wavevectors.
struct Band {
  double k_min = 1.0;
  double k_max = 4.0;
};

// Seeded random fields with spectral amplitude |k|^slope inside `band` and zero
// outside. Coefficients are drawn by enumerating wavevectors in a fixed order
// independent of the grid size, so the same (seed, slope, band) produces the
// same continuous function on every grid that resolves the band.
// All results are spectral, mean-zero and dealiased. An empty band throws.

/// Divergence-free velocity field.
VectorField random_divfree_field(const Grid& grid, std::uint64_t seed, double spectrum_slope, Band band);

/// Vector field without the divergence constraint.
VectorField random_vector_field(const Grid& grid, std::uint64_t seed, double spectrum_slope, Band band);

SymTensorField random_symmetric_tensor(const Grid& grid, std::uint64_t seed, double spectrum_slope,
                                       Band band);

ScalarField random_scalar_field(const Grid& grid, std::uint64_t seed, double spectrum_slope, Band band);

/// Adds `value` at wavevector k and its conjugate at -k, for whichever of the
/// two the half layout stores.
void add_mode(const Grid& grid, std::array<int, 3> k, Complex value, std::span<Complex> coeffs);

/// exp(i k·x) + c.c. style real Fourier mode: amplitude * cos(k·x + phase) in
/// component `component`.
template <class Shape>
Field<Shape> fourier_mode(const Grid& grid, std::array<int, 3> k, int component, double amplitude,
                          double phase = 0.0) {
  Field<Shape> f(grid, Representation::spectral);
  const double scale = 0.5 * amplitude * static_cast<double>(grid.physical_points());
  add_mode(grid, k, std::polar(scale, phase), f.coefficients(component));
  return f;
}

}  // namespace oldroyd
