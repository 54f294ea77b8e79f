#pragma once

#include <span>

#include "oldroyd/field.hpp"

namespace oldroyd {

// Normalization convention (the only place it is fixed):
//   forward  f̂(k) = Σ_x f(x) e^{-i k·x}            (unnormalized)
//   inverse  f(x)  = N^{-dim} Σ_k f̂(k) e^{i k·x}
// so the torus L² inner product is
//   <f, g> = (2π/N)^dim Σ_x f g = (2π)^dim N^{-2 dim} Σ_k f̂ conj(ĝ)
// with the sum over the full spectrum (half layout: multiplicity 1 or 2).
namespace fft {

/// Real-to-complex transform of one component. Thread safe.
void forward(const Grid& grid, std::span<const double> in, std::span<Complex> out);

/// Complex-to-real transform including the N^{-dim} factor. `in` is not modified.
void inverse(const Grid& grid, std::span<const Complex> in, std::span<double> out);

/// (2π)^dim / N^{2 dim}: converts Σ_k f̂ conj(ĝ) into the torus L² inner product.
double parseval_factor(const Grid& grid);

}  // namespace fft

template <class Shape>
Field<Shape> to_spectral(const Field<Shape>& f) {
  f.require(Representation::physical);
  Field<Shape> out(f.grid(), Representation::spectral);
  for (int c = 0; c < f.components(); ++c) {
    fft::forward(f.grid(), f.values(c), out.coefficients(c));
  }
  return out;
}

template <class Shape>
Field<Shape> to_physical(const Field<Shape>& f) {
  f.require(Representation::spectral);
  Field<Shape> out(f.grid(), Representation::physical);
  for (int c = 0; c < f.components(); ++c) {
    fft::inverse(f.grid(), f.coefficients(c), out.values(c));
  }
  return out;
}

/// Returns `f` unchanged when already spectral, otherwise transforms it.
template <class Shape>
Field<Shape> as_spectral(const Field<Shape>& f) {
  return f.is_spectral() ? f : to_spectral(f);
}

template <class Shape>
Field<Shape> as_physical(const Field<Shape>& f) {
  return f.is_spectral() ? to_physical(f) : f;
}

}  // namespace oldroyd
