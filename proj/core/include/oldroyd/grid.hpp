#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace oldroyd {

/// Isotropic periodic grid on the torus [0, 2π)^dim.
///
/// Physical samples are stored row-major over `dim` axes of `size` points.
/// Spectral coefficients use the real-to-complex half layout: the last axis
/// keeps only indices 0..size/2.
class Grid {
 public:
  static constexpr double kDefaultDealias = 2.0 / 3.0;

  Grid(int dim, int size, double dealias_fraction = kDefaultDealias);

  int dim() const noexcept { return dim_; }
  int size() const noexcept { return size_; }
  double dealias_fraction() const noexcept { return dealias_; }

  std::size_t physical_points() const noexcept;
  std::size_t spectral_modes() const noexcept;
  int half_size() const noexcept { return size_ / 2 + 1; }

  double spacing() const noexcept;
  /// (2π)^dim.
  double volume() const noexcept;

  /// Signed wavenumber of axis index i on a full axis, in [-size/2, size/2).
  int wavenumber(int index) const noexcept { return index < size_ / 2 ? index : index - size_; }

  /// Largest retained |k_i| after dealiasing.
  double dealias_cutoff() const noexcept { return dealias_ * (size_ / 2); }

  bool operator==(const Grid&) const = default;

 private:
  int dim_;
  int size_;
  double dealias_;
};

/// Per-mode wavevector data for a grid's spectral layout, shared and cached.
struct ModeTable {
  /// Integer wavevector of every stored spectral mode (unused axes are 0).
  std::vector<std::array<int, 3>> k;
  /// Wavevector used for derivatives: equal to k except Nyquist components are 0.
  std::vector<std::array<double, 3>> kd;
  /// |k| (Euclidean, Nyquist counted as -size/2).
  std::vector<double> magnitude;
  /// Hermitian multiplicity of a stored mode in the full spectrum (1 or 2).
  std::vector<double> multiplicity;
  /// Whether the mode survives the dealiasing filter.
  std::vector<unsigned char> retained;
};

/// Storage index of integer wavevector k in the half layout, if stored there.
std::optional<std::size_t> mode_index(const Grid& grid, std::array<int, 3> k);

/// Returns the cached table for `grid`. Thread safe.
const ModeTable& modes(const Grid& grid);

}  // namespace oldroyd
