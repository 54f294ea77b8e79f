#include "oldroyd/littlewood_paley.hpp"

#include <algorithm>
#include <array>
#include <functional>

namespace oldroyd::lp {

DyadicCutoff::DyadicCutoff(int j_min, int j_max) : j_min_(j_min), j_max_(j_max) {
  if (j_min > j_max) throw ContractViolation("dyadic cutoff: j_min > j_max");
}

DyadicCutoff DyadicCutoff::for_grid(const Grid& grid) {
  return {-2, static_cast<int>(std::ceil(std::log2(grid.size() / 2.0)))};
}

double DyadicCutoff::chi(double r) {
  // χ(r) = ψ((4/3 - r) / (4/3 - 3/4)),  ψ(t) = e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)}).
  const double t = (4.0 / 3.0 - r) / (4.0 / 3.0 - 0.75);
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double DyadicCutoff::low_pass_weight(int j, double magnitude) const {
  if (magnitude == 0.0 || j <= j_min_) return 0.0;
  const int top = std::min(j, j_max_ + 1);
  return chi(std::ldexp(magnitude, -top)) - chi(std::ldexp(magnitude, -j_min_));
}

double time_norm(std::span<const double> series, double dt, double q) {
  if (series.empty()) return 0.0;
  if (std::isinf(q)) return *std::max_element(series.begin(), series.end());
  if (q < 1.0) throw ContractViolation("time norm exponent must be >= 1");
  double integral = 0.0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    integral += 0.5 * dt * (std::pow(series[i - 1], q) + std::pow(series[i], q));
  }
  return std::pow(integral, 1.0 / q);
}

namespace detail {

double max_derivative_norm(const Grid& grid, std::span<const std::span<const Complex>> components,
                           std::span<const double> weights, int order) {
  const auto& table = modes(grid);
  const int dim = grid.dim();
  double best = 0.0;
  std::array<int, 3> alpha{};
  // Enumerate multi-indices with |α| = order.
  std::function<void(int, int)> visit = [&](int axis, int remaining) {
    if (axis == dim - 1) {
      alpha[axis] = remaining;
      double sum = 0.0;
      for (std::size_t c = 0; c < components.size(); ++c) {
        const auto coeffs = components[c];
        double part = 0.0;
        for (std::size_t m = 0; m < coeffs.size(); ++m) {
          double symbol = 1.0;
          for (int a = 0; a < dim; ++a) symbol *= std::pow(table.kd[m][a], alpha[a]);
          part += table.multiplicity[m] * symbol * symbol * std::norm(coeffs[m]);
        }
        sum += weights[c] * part;
      }
      best = std::max(best, std::sqrt(sum * fft::parseval_factor(grid)));
      return;
    }
    for (int take = 0; take <= remaining; ++take) {
      alpha[axis] = take;
      visit(axis + 1, remaining - take);
    }
  };
  visit(0, order);
  return best;
}

}  // namespace detail
}  // namespace oldroyd::lp
