#include "oldroyd/operators.hpp"

#include <array>

namespace oldroyd {

namespace detail {

void differentiate(const Grid& grid, std::span<const Complex> in, int axis, std::span<Complex> out) {
  const auto& kd = modes(grid).kd;
  for (std::size_t m = 0; m < in.size(); ++m) {
    out[m] = Complex(0.0, kd[m][axis]) * in[m];
  }
}

double weighted_mode_sum(const Grid& grid, std::span<const Complex> a, std::span<const Complex> b) {
  const auto& mult = modes(grid).multiplicity;
  double sum = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    sum += mult[m] * (a[m].real() * b[m].real() + a[m].imag() * b[m].imag());
  }
  return sum;
}

}  // namespace detail

VectorField leray_project(const VectorField& v) {
  v.require(Representation::spectral);
  const Grid& g = v.grid();
  const int dim = g.dim();
  const auto& kd = modes(g).kd;
  VectorField out = v;
  const std::size_t count = g.spectral_modes();
  for (std::size_t m = 0; m < count; ++m) {
    double k2 = 0.0;
    Complex kv{};
    for (int a = 0; a < dim; ++a) {
      k2 += kd[m][a] * kd[m][a];
      kv += kd[m][a] * v.coefficients(a)[m];
    }
    if (k2 == 0.0) continue;
    const Complex factor = kv / k2;
    for (int a = 0; a < dim; ++a) out.coefficients(a)[m] -= kd[m][a] * factor;
  }
  return out;
}

TensorField gradient(const VectorField& u) {
  u.require(Representation::spectral);
  const int dim = u.dim();
  TensorField out(u.grid(), Representation::spectral);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      detail::differentiate(u.grid(), u.coefficients(i), j, out.coefficients(tensor_index(i, j, dim)));
    }
  }
  return out;
}

VectorField gradient(const ScalarField& p) {
  p.require(Representation::spectral);
  VectorField out(p.grid(), Representation::spectral);
  for (int j = 0; j < p.dim(); ++j) {
    detail::differentiate(p.grid(), p.coefficients(0), j, out.coefficients(j));
  }
  return out;
}

ScalarField divergence(const VectorField& v) {
  v.require(Representation::spectral);
  const auto& kd = modes(v.grid()).kd;
  ScalarField out(v.grid(), Representation::spectral);
  auto dst = out.coefficients(0);
  for (int a = 0; a < v.dim(); ++a) {
    const auto src = v.coefficients(a);
    for (std::size_t m = 0; m < dst.size(); ++m) dst[m] += Complex(0.0, kd[m][a]) * src[m];
  }
  return out;
}

VectorField divergence(const SymTensorField& tau) {
  tau.require(Representation::spectral);
  const int dim = tau.dim();
  const auto& kd = modes(tau.grid()).kd;
  VectorField out(tau.grid(), Representation::spectral);
  for (int i = 0; i < dim; ++i) {
    auto dst = out.coefficients(i);
    for (int j = 0; j < dim; ++j) {
      const auto src = tau.coefficients(sym_index(i, j, dim));
      for (std::size_t m = 0; m < dst.size(); ++m) dst[m] += Complex(0.0, kd[m][j]) * src[m];
    }
  }
  return out;
}

SymTensorField symmetric_part(const TensorField& a) {
  const int dim = a.dim();
  SymTensorField out(a.grid(), a.representation());
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      const int c = sym_index(i, j, dim);
      if (a.is_spectral()) {
        auto dst = out.coefficients(c);
        const auto aij = a.coefficients(tensor_index(i, j, dim));
        const auto aji = a.coefficients(tensor_index(j, i, dim));
        for (std::size_t m = 0; m < dst.size(); ++m) dst[m] = 0.5 * (aij[m] + aji[m]);
      } else {
        auto dst = out.values(c);
        const auto aij = a.values(tensor_index(i, j, dim));
        const auto aji = a.values(tensor_index(j, i, dim));
        for (std::size_t p = 0; p < dst.size(); ++p) dst[p] = 0.5 * (aij[p] + aji[p]);
      }
    }
  }
  return out;
}

TensorField antisymmetric_part(const TensorField& a) {
  const int dim = a.dim();
  TensorField out(a.grid(), a.representation());
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (a.is_spectral()) {
        auto dst = out.coefficients(tensor_index(i, j, dim));
        const auto aij = a.coefficients(tensor_index(i, j, dim));
        const auto aji = a.coefficients(tensor_index(j, i, dim));
        for (std::size_t m = 0; m < dst.size(); ++m) dst[m] = 0.5 * (aij[m] - aji[m]);
      } else {
        auto dst = out.values(tensor_index(i, j, dim));
        const auto aij = a.values(tensor_index(i, j, dim));
        const auto aji = a.values(tensor_index(j, i, dim));
        for (std::size_t p = 0; p < dst.size(); ++p) dst[p] = 0.5 * (aij[p] - aji[p]);
      }
    }
  }
  return out;
}

SymTensorField deformation(const VectorField& u) { return symmetric_part(gradient(u)); }

TensorField vorticity(const VectorField& u) { return antisymmetric_part(gradient(u)); }

SymTensorField q_bilinear(const SymTensorField& tau, const TensorField& grad_u, double b) {
  tau.require(Representation::physical);
  grad_u.require(Representation::physical);
  if (!(tau.grid() == grad_u.grid())) throw ContractViolation("q_bilinear: grid mismatch");
  const int dim = tau.dim();
  const std::size_t points = tau.grid().physical_points();
  SymTensorField out(tau.grid(), Representation::physical);

  using Mat = std::array<std::array<double, 3>, 3>;
  for (std::size_t p = 0; p < points; ++p) {
    Mat t{}, om{}, d{};
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) {
        t[i][j] = tau.values(sym_index(i, j, dim))[p];
        const double gij = grad_u.values(tensor_index(i, j, dim))[p];
        const double gji = grad_u.values(tensor_index(j, i, dim))[p];
        om[i][j] = 0.5 * (gij - gji);
        d[i][j] = 0.5 * (gij + gji);
      }
    }
    for (int i = 0; i < dim; ++i) {
      for (int j = i; j < dim; ++j) {
        double q = 0.0;
        for (int k = 0; k < dim; ++k) {
          q += t[i][k] * om[k][j] - om[i][k] * t[k][j];
          if (b != 0.0) q += b * (d[i][k] * t[k][j] + t[i][k] * d[k][j]);
        }
        out.values(sym_index(i, j, dim))[p] = q;
      }
    }
  }
  return out;
}

void contract_velocity(std::span<const double> u_phys, std::span<const double> grad,
                       int components, std::size_t points, int dim, std::span<double> out) {
  for (int c = 0; c < components; ++c) {
    auto dst = out.subspan(c * points, points);
    std::fill(dst.begin(), dst.end(), 0.0);
    for (int a = 0; a < dim; ++a) {
      const auto ua = u_phys.subspan(a * points, points);
      const auto ga = grad.subspan((c * dim + a) * points, points);
      for (std::size_t p = 0; p < points; ++p) dst[p] += ua[p] * ga[p];
    }
  }
}

double max_divergence(const VectorField& v) {
  v.require(Representation::spectral);
  const auto& kd = modes(v.grid()).kd;
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t m = 0; m < v.grid().spectral_modes(); ++m) {
    Complex div{};
    double k2 = 0.0;
    double v2 = 0.0;
    for (int a = 0; a < v.dim(); ++a) {
      div += kd[m][a] * v.coefficients(a)[m];
      k2 += kd[m][a] * kd[m][a];
      v2 += std::norm(v.coefficients(a)[m]);
    }
    worst = std::max(worst, std::abs(div));
    scale = std::max(scale, std::sqrt(k2 * v2));
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

}  // namespace oldroyd
