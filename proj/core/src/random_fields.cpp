#include "oldroyd/random_fields.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "oldroyd/errors.hpp"
#include "oldroyd/operators.hpp"

namespace oldroyd {

void add_mode(const Grid& grid, std::array<int, 3> k, Complex value, std::span<Complex> coeffs) {
  std::array<int, 3> minus{-k[0], -k[1], -k[2]};
  const auto at = mode_index(grid, k);
  const auto conj_at = mode_index(grid, minus);
  if (at) coeffs[*at] += value;
  if (conj_at && conj_at != at) coeffs[*conj_at] += std::conj(value);
}

namespace {

// One representative of each ±k pair: the last nonzero component is positive.
bool canonical(const std::array<int, 3>& k, int dim) {
  for (int a = dim - 1; a >= 0; --a) {
    if (k[a] != 0) return k[a] > 0;
  }
  return false;
}

template <class Shape>
Field<Shape> random_field(const Grid& grid, std::uint64_t seed, double slope, Band band, bool solenoidal) {
  if (!(band.k_min <= band.k_max) || band.k_max <= 0.0) {
    throw ContractViolation("random field: empty band");
  }
  if (band.k_max >= grid.size() / 2) {
    throw ContractViolation("random field: band exceeds the grid's resolvable range");
  }
  const int dim = grid.dim();
  const int comps = Shape::components(dim);
  const int reach = static_cast<int>(std::floor(band.k_max));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Field<Shape> out(grid, Representation::spectral);
  const double points = static_cast<double>(grid.physical_points());

  std::size_t count = 0;
  std::array<int, 3> k{};
  const int lo = -reach;
  const int span = 2 * reach + 1;
  const int total = dim == 3 ? span * span * span : span * span;
  std::vector<Complex> coef(comps);
  for (int flat = 0; flat < total; ++flat) {
    int rest = flat;
    for (int a = dim - 1; a >= 0; --a) {
      k[a] = lo + rest % span;
      rest /= span;
    }
    if (!canonical(k, dim)) continue;
    double mag2 = 0.0;
    for (int a = 0; a < dim; ++a) mag2 += static_cast<double>(k[a]) * k[a];
    const double mag = std::sqrt(mag2);
    if (mag < band.k_min || mag > band.k_max) continue;
    ++count;

    const double amp = std::pow(mag, slope) * points / std::sqrt(2.0);
    for (int c = 0; c < comps; ++c) {
      const double re = normal(rng);
      const double im = normal(rng);
      coef[c] = amp * Complex(re, im);
    }
    if (solenoidal) {
      Complex kc{};
      for (int a = 0; a < dim; ++a) kc += static_cast<double>(k[a]) * coef[a];
      for (int a = 0; a < dim; ++a) coef[a] -= static_cast<double>(k[a]) * kc / mag2;
    }
    for (int c = 0; c < comps; ++c) add_mode(grid, k, coef[c], out.coefficients(c));
  }
  if (count == 0) throw ContractViolation("random field: empty band");
  return dealias(out);
}

}  // namespace

VectorField random_divfree_field(const Grid& grid, std::uint64_t seed, double spectrum_slope, Band band) {
  return random_field<VectorShape>(grid, seed, spectrum_slope, band, true);
}

VectorField random_vector_field(const Grid& grid, std::uint64_t seed, double spectrum_slope, Band band) {
  return random_field<VectorShape>(grid, seed, spectrum_slope, band, false);
}

SymTensorField random_symmetric_tensor(const Grid& grid, std::uint64_t seed, double spectrum_slope,
                                       Band band) {
  return random_field<SymTensorShape>(grid, seed, spectrum_slope, band, false);
}

ScalarField random_scalar_field(const Grid& grid, std::uint64_t seed, double spectrum_slope, Band band) {
  return random_field<ScalarShape>(grid, seed, spectrum_slope, band, false);
}

}  // namespace oldroyd
