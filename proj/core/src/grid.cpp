#include "oldroyd/grid.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include "oldroyd/errors.hpp"

namespace oldroyd {

Grid::Grid(int dim, int size, double dealias_fraction)
    : dim_(dim), size_(size), dealias_(dealias_fraction) {
  if (dim != 2 && dim != 3) {
    throw ConfigError("dimension must be 2 or 3", "grid.dim");
  }
  if (size < 16 || !std::has_single_bit(static_cast<unsigned>(size))) {
    throw ConfigError("size must be a power of two >= 16", "grid.size");
  }
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) {
    throw ConfigError("dealias fraction must lie in (0, 1]", "grid.dealias_fraction");
  }
}

std::size_t Grid::physical_points() const noexcept {
  std::size_t n = 1;
  for (int a = 0; a < dim_; ++a) n *= static_cast<std::size_t>(size_);
  return n;
}

std::size_t Grid::spectral_modes() const noexcept {
  std::size_t n = static_cast<std::size_t>(half_size());
  for (int a = 0; a + 1 < dim_; ++a) n *= static_cast<std::size_t>(size_);
  return n;
}

double Grid::spacing() const noexcept { return 2.0 * std::numbers::pi / size_; }

double Grid::volume() const noexcept { return std::pow(2.0 * std::numbers::pi, dim_); }

namespace {

std::unique_ptr<ModeTable> build_table(const Grid& grid) {
  auto table = std::make_unique<ModeTable>();
  const std::size_t count = grid.spectral_modes();
  table->k.resize(count);
  table->kd.resize(count);
  table->magnitude.resize(count);
  table->multiplicity.resize(count);
  table->retained.resize(count);

  const int n = grid.size();
  const int half = grid.half_size();
  const int nyquist = -n / 2;
  const double cutoff = grid.dealias_cutoff();
  const int outer = grid.dim() == 3 ? n : 1;

  std::size_t idx = 0;
  for (int i0 = 0; i0 < outer; ++i0) {
    for (int i1 = 0; i1 < n; ++i1) {
      for (int i2 = 0; i2 < half; ++i2, ++idx) {
        std::array<int, 3> k{};
        if (grid.dim() == 3) {
          k = {grid.wavenumber(i0), grid.wavenumber(i1), i2 == n / 2 ? nyquist : i2};
        } else {
          k = {grid.wavenumber(i1), i2 == n / 2 ? nyquist : i2, 0};
        }
        std::array<double, 3> kd{};
        double mag2 = 0.0;
        bool keep = true;
        for (int a = 0; a < grid.dim(); ++a) {
          kd[a] = k[a] == nyquist ? 0.0 : static_cast<double>(k[a]);
          mag2 += static_cast<double>(k[a]) * k[a];
          if (std::abs(k[a]) > cutoff) keep = false;
        }
        table->k[idx] = k;
        table->kd[idx] = kd;
        table->magnitude[idx] = std::sqrt(mag2);
        table->multiplicity[idx] = (i2 == 0 || i2 == n / 2) ? 1.0 : 2.0;
        table->retained[idx] = keep ? 1 : 0;
      }
    }
  }
  return table;
}

}  // namespace

std::optional<std::size_t> mode_index(const Grid& grid, std::array<int, 3> k) {
  const int n = grid.size();
  const int dim = grid.dim();
  for (int a = 0; a < dim; ++a) {
    if (k[a] < -n / 2 || k[a] > n / 2) return std::nullopt;
  }
  int last = k[dim - 1];
  if (last == -n / 2) last = n / 2;
  if (last < 0) return std::nullopt;
  auto wrap = [n](int v) { return static_cast<std::size_t>((v % n + n) % n); };
  std::size_t idx = 0;
  for (int a = 0; a + 1 < dim; ++a) idx = idx * static_cast<std::size_t>(n) + wrap(k[a]);
  return idx * static_cast<std::size_t>(grid.half_size()) + static_cast<std::size_t>(last);
}

const ModeTable& modes(const Grid& grid) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, double>, std::unique_ptr<ModeTable>> cache;
  const std::lock_guard lock(mutex);
  auto& slot = cache[{grid.dim(), grid.size(), grid.dealias_fraction()}];
  if (!slot) slot = build_table(grid);
  return *slot;
}

}  // namespace oldroyd
