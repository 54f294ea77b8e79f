#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <string>
#include <vector>

#include "oldroyd/errors.hpp"
#include "oldroyd/grid.hpp"

namespace oldroyd {

using Complex = std::complex<double>;

enum class Representation : std::uint8_t { physical = 0, spectral = 1 };

const char* to_string(Representation rep);

// Component layouts. `weight` is the multiplicity of a stored component in the
// Frobenius inner product (off-diagonal entries of a symmetric tensor count twice).
struct ScalarShape {
  static constexpr int components(int) { return 1; }
  static constexpr double weight(int, int) { return 1.0; }
};

struct VectorShape {
  static constexpr int components(int dim) { return dim; }
  static constexpr double weight(int, int) { return 1.0; }
};

/// Upper triangle, row-major: (0,0) (0,1) [(0,2)] (1,1) [(1,2) (2,2)].
struct SymTensorShape {
  static constexpr int components(int dim) { return dim * (dim + 1) / 2; }
  static constexpr double weight(int c, int dim);
};

/// Full dim x dim tensor, entry (i,j) at i*dim + j.
struct TensorShape {
  static constexpr int components(int dim) { return dim * dim; }
  static constexpr double weight(int, int) { return 1.0; }
};

constexpr int sym_index(int i, int j, int dim) {
  if (i > j) std::swap(i, j);
  // Entries before row i: dim + (dim-1) + ... + (dim-i+1).
  return i * dim - i * (i - 1) / 2 + (j - i);
}

constexpr double SymTensorShape::weight(int c, int dim) {
  for (int i = 0; i < dim; ++i) {
    if (sym_index(i, i, dim) == c) return 1.0;
  }
  return 2.0;
}

constexpr int tensor_index(int i, int j, int dim) { return i * dim + j; }

/// A real-valued field on a periodic grid, held either as physical samples or
/// as half-spectrum Fourier coefficients (never both).
template <class Shape>
class Field {
 public:
  using shape_type = Shape;

  Field(const Grid& grid, Representation rep) : grid_(grid), rep_(rep) {
    const auto c = static_cast<std::size_t>(components());
    if (rep == Representation::physical) {
      real_.assign(c * grid.physical_points(), 0.0);
    } else {
      complex_.assign(c * grid.spectral_modes(), Complex{});
    }
  }

  static Field zeros(const Grid& grid, Representation rep = Representation::spectral) {
    return Field(grid, rep);
  }

  const Grid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return grid_.dim(); }
  int components() const noexcept { return Shape::components(grid_.dim()); }
  double weight(int c) const noexcept { return Shape::weight(c, grid_.dim()); }
  Representation representation() const noexcept { return rep_; }
  bool is_spectral() const noexcept { return rep_ == Representation::spectral; }

  std::span<double> values(int c) {
    require(Representation::physical);
    const auto n = grid_.physical_points();
    return {real_.data() + c * n, n};
  }
  std::span<const double> values(int c) const {
    require(Representation::physical);
    const auto n = grid_.physical_points();
    return {real_.data() + c * n, n};
  }
  std::span<Complex> coefficients(int c) {
    require(Representation::spectral);
    const auto n = grid_.spectral_modes();
    return {complex_.data() + c * n, n};
  }
  std::span<const Complex> coefficients(int c) const {
    require(Representation::spectral);
    const auto n = grid_.spectral_modes();
    return {complex_.data() + c * n, n};
  }

  std::span<double> all_values() { require(Representation::physical); return real_; }
  std::span<const double> all_values() const { require(Representation::physical); return real_; }
  std::span<Complex> all_coefficients() { require(Representation::spectral); return complex_; }
  std::span<const Complex> all_coefficients() const {
    require(Representation::spectral);
    return complex_;
  }

  Field& operator+=(const Field& other) {
    check_compatible(other);
    if (is_spectral()) {
      for (std::size_t i = 0; i < complex_.size(); ++i) complex_[i] += other.complex_[i];
    } else {
      for (std::size_t i = 0; i < real_.size(); ++i) real_[i] += other.real_[i];
    }
    return *this;
  }
  Field& operator-=(const Field& other) {
    check_compatible(other);
    if (is_spectral()) {
      for (std::size_t i = 0; i < complex_.size(); ++i) complex_[i] -= other.complex_[i];
    } else {
      for (std::size_t i = 0; i < real_.size(); ++i) real_[i] -= other.real_[i];
    }
    return *this;
  }
  Field& operator*=(double c) {
    for (auto& v : complex_) v *= c;
    for (auto& v : real_) v *= c;
    return *this;
  }

  /// this += c * other.
  Field& axpy(double c, const Field& other) {
    check_compatible(other);
    for (std::size_t i = 0; i < complex_.size(); ++i) complex_[i] += c * other.complex_[i];
    for (std::size_t i = 0; i < real_.size(); ++i) real_[i] += c * other.real_[i];
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double c, Field a) { return a *= c; }
  friend Field operator*(Field a, double c) { return a *= c; }

  /// Bitwise equality of grid, representation and data.
  bool identical(const Field& other) const {
    return grid_ == other.grid_ && rep_ == other.rep_ && real_ == other.real_ &&
           complex_ == other.complex_;
  }

  void require(Representation rep) const {
    if (rep_ != rep) {
      throw ContractViolation(std::string("field is in ") + to_string(rep_) +
                              " form, operation requires " + to_string(rep));
    }
  }

 private:
  void check_compatible(const Field& other) const {
    if (!(grid_ == other.grid_) || rep_ != other.rep_) {
      throw ContractViolation("fields differ in grid or representation");
    }
  }

  Grid grid_;
  Representation rep_;
  std::vector<double> real_;
  std::vector<Complex> complex_;
};

using ScalarField = Field<ScalarShape>;
using VectorField = Field<VectorShape>;
using SymTensorField = Field<SymTensorShape>;
using TensorField = Field<TensorShape>;

}  // namespace oldroyd
