#include "oldroyd/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>
#include <vector>

namespace oldroyd {

const char* to_string(Representation rep) {
  return rep == Representation::physical ? "physical" : "spectral";
}

namespace fft {
namespace {

// FFTW_ESTIMATE keeps plan selection (and so the arithmetic order) independent
// of timing, which the determinism guarantees rely on.
constexpr unsigned kPlanFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

struct Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  Plans() = default;
  Plans(const Plans&) = delete;
  Plans& operator=(const Plans&) = delete;
  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
  }
};

const Plans& plans_for(const Grid& grid) {
  // The FFTW planner is not reentrant; execution with new arrays is.
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<Plans>> cache;
  const std::lock_guard lock(mutex);
  auto& slot = cache[{grid.dim(), grid.size()}];
  if (!slot) {
    slot = std::make_unique<Plans>();
    std::vector<int> dims(grid.dim(), grid.size());
    std::vector<double> real(grid.physical_points());
    auto* spec = fftw_alloc_complex(grid.spectral_modes());
    slot->forward = fftw_plan_dft_r2c(grid.dim(), dims.data(), real.data(), spec, kPlanFlags);
    slot->inverse = fftw_plan_dft_c2r(grid.dim(), dims.data(), spec, real.data(), kPlanFlags);
    fftw_free(spec);
  }
  return *slot;
}

}  // namespace

void forward(const Grid& grid, std::span<const double> in, std::span<Complex> out) {
  const auto& p = plans_for(grid);
  // r2c does not modify its input.
  fftw_execute_dft_r2c(p.forward, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void inverse(const Grid& grid, std::span<const Complex> in, std::span<double> out) {
  const auto& p = plans_for(grid);
  // c2r overwrites its input.
  thread_local std::vector<Complex> scratch;
  scratch.assign(in.begin(), in.end());
  fftw_execute_dft_c2r(p.inverse, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  const double scale = 1.0 / static_cast<double>(grid.physical_points());
  for (auto& v : out) v *= scale;
}

double parseval_factor(const Grid& grid) {
  const double points = static_cast<double>(grid.physical_points());
  return grid.volume() / (points * points);
}

}  // namespace fft
}  // namespace oldroyd
