#include <catch_amalgamated.hpp>

#include <oldroyd/checkpoint.hpp>
#include <oldroyd/fft.hpp>
#include <oldroyd/operators.hpp>
#include <oldroyd/random_fields.hpp>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <sstream>

#include "oracles.hpp"

using namespace oldroyd;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField sampled_scalar(const Grid& g, const std::function<double(std::array<double, 3>)>& fn) {
  ScalarField f(g, Representation::physical);
  oracle::sample(f, 0, fn);
  return f;
}

}  // namespace

TEST_CASE("Grid rejects unsupported shapes", "[grid]") {
  CHECK_THROWS_AS(Grid(1, 32), ConfigError);
  CHECK_THROWS_AS(Grid(2, 24), ConfigError);
  CHECK_THROWS_AS(Grid(2, 8), ConfigError);
  CHECK_THROWS_AS(Grid(2, 32, 0.0), ConfigError);
  const Grid g(2, 32);
  CHECK(g.spectral_modes() == 32u * 17u);
  CHECK(g.wavenumber(15) == 15);
  CHECK(g.wavenumber(16) == -16);
  CHECK(g.wavenumber(31) == -1);
}

TEST_CASE("Transforms map pure modes to single coefficients", "[fft]") {
  const Grid g(2, 32);
  const auto points = static_cast<double>(g.physical_points());

  SECTION("sin(x1) populates only k = (±1, 0)") {
    const auto f = to_spectral(sampled_scalar(g, [](auto x) { return std::sin(x[0]); }));
    const auto plus = *mode_index(g, {1, 0, 0});
    const auto minus = *mode_index(g, {-1, 0, 0});
    const auto c = f.coefficients(0);
    CHECK_THAT(c[plus].imag(), WithinRel(-points / 2, 1e-13));
    CHECK_THAT(c[minus].imag(), WithinRel(points / 2, 1e-13));
    for (std::size_t m = 0; m < c.size(); ++m) {
      if (m == plus || m == minus) continue;
      CHECK(std::abs(c[m]) < 1e-10);
    }
  }

  SECTION("constant populates only the zero mode") {
    const auto f = to_spectral(sampled_scalar(g, [](auto) { return 1.0; }));
    const auto c = f.coefficients(0);
    CHECK_THAT(c[0].real(), WithinRel(points, 1e-14));
    for (std::size_t m = 1; m < c.size(); ++m) CHECK(std::abs(c[m]) < 1e-10);
  }

  SECTION("wrong representation is a contract violation") {
    const ScalarField phys(g, Representation::physical);
    CHECK_THROWS_AS(to_physical(phys), ContractViolation);
    CHECK_THROWS_AS(to_spectral(to_spectral(phys)), ContractViolation);
  }
}

TEST_CASE("Forward transform agrees with a direct DFT", "[fft][oracle]") {
  const Grid g(2, 16);
  const auto f = to_physical(random_scalar_field(g, 11, 0.0, {1.0, 5.0}));
  const auto spec = to_spectral(f);
  for (std::array<int, 3> k : {std::array<int, 3>{1, 2, 0}, {-3, 4, 0}, {0, 5, 0}, {2, 0, 0}}) {
    const auto direct = oracle::direct_dft(g, f.values(0), k);
    const auto fast = spec.coefficients(0)[*mode_index(g, k)];
    CHECK(std::abs(direct - fast) < 1e-10 * (1.0 + std::abs(direct)));
  }
}

TEST_CASE("Round trip and Parseval on random fields", "[fft]") {
  for (int dim : {2, 3}) {
    const Grid g(dim, dim == 2 ? 64 : 16);
    const auto tau = random_symmetric_tensor(g, 5, -1.0, {1.0, 5.0});
    const auto phys = to_physical(tau);
    const auto back = to_spectral(phys);
    CHECK(oracle::rel_diff(back, tau) <= 1e-12);
    CHECK_THAT(norm_l2(phys), WithinRel(norm_l2(tau), 1e-12));
  }
}

TEST_CASE("Fractional Laplacian multiplies by |k|^s", "[operators]") {
  const Grid g(2, 32);

  SECTION("single mode with |k| = 2, s = 1.5") {
    const auto f = fourier_mode<ScalarShape>(g, {2, 0, 0}, 0, 1.0);
    const auto out = fractional_laplacian(f, 1.5);
    const auto m = *mode_index(g, {2, 0, 0});
    CHECK_THAT(std::abs(out.coefficients(0)[m]),
               WithinRel(std::pow(2.0, 1.5) * std::abs(f.coefficients(0)[m]), 1e-14));
  }

  SECTION("Λ² equals -Δ") {
    const auto f = random_scalar_field(g, 3, 0.0, {1.0, 8.0});
    const auto lap = divergence(gradient(f));
    const auto l2 = fractional_laplacian(f, 2.0);
    const auto sum = l2 + lap;
    CHECK(oracle::max_coefficient(sum) <= 1e-12 * oracle::max_coefficient(l2));
  }

  SECTION("semigroup Λ^{1/2}Λ^{1/2} = Λ and Λ^{s1}Λ^{s2} = Λ^{s1+s2}") {
    const auto f = random_divfree_field(g, 17, -0.5, {1.0, 9.0});
    CHECK(oracle::rel_diff(fractional_laplacian(fractional_laplacian(f, 0.5), 0.5),
                           fractional_laplacian(f, 1.0)) <= 1e-12);
    CHECK(oracle::rel_diff(fractional_laplacian(fractional_laplacian(f, -1.0), 1.7),
                           fractional_laplacian(f, 0.7)) <= 1e-12);
  }

  SECTION("negative power needs a mean-zero field") {
    auto f = to_spectral(sampled_scalar(g, [](auto x) { return 1.0 + std::sin(x[0]); }));
    CHECK_THROWS_AS(fractional_laplacian(f, -1.0), ContractViolation);
    CHECK_NOTHROW(fractional_laplacian(f, 1.0));
  }
}

TEST_CASE("Leray projection", "[operators]") {
  const Grid g(2, 32);

  SECTION("annihilates gradients") {
    const auto p = random_scalar_field(g, 8, 0.0, {1.0, 6.0});
    const auto grad = gradient(p);
    CHECK(oracle::max_coefficient(leray_project(grad)) <= 1e-12 * oracle::max_coefficient(grad));
  }

  SECTION("leaves a stream-function field unchanged") {
    const auto psi = random_scalar_field(g, 9, 0.0, {1.0, 6.0});
    const auto grad = gradient(psi);
    VectorField v(g, Representation::spectral);
    for (std::size_t m = 0; m < g.spectral_modes(); ++m) {
      v.coefficients(0)[m] = -grad.coefficients(1)[m];
      v.coefficients(1)[m] = grad.coefficients(0)[m];
    }
    CHECK(oracle::rel_diff(leray_project(v), v) <= 1e-14);
  }

  SECTION("idempotent and divergence free on 100 seeded fields") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto v = random_vector_field(g, seed, -1.0, {1.0, 10.0});
      const auto pv = leray_project(v);
      CHECK(max_divergence(pv) <= 1e-12);
      CHECK(oracle::rel_diff(leray_project(pv), pv) <= 1e-12);
    }
  }
}

TEST_CASE("Deformation and vorticity", "[operators]") {
  const Grid g(2, 32);

  SECTION("shear u = (sin x2, 0)") {
    VectorField u(g, Representation::physical);
    oracle::sample(u, 0, [](auto x) { return std::sin(x[1]); });
    const auto us = to_spectral(u);
    const auto d = to_physical(deformation(us));
    const auto w = to_physical(vorticity(us));
    double err = 0.0;
    for (std::size_t p = 0; p < g.physical_points(); ++p) {
      const double expected = 0.5 * std::cos(oracle::coordinates(g, p)[1]);
      err = std::max(err, std::abs(d.values(sym_index(0, 1, 2))[p] - expected));
      err = std::max(err, std::abs(d.values(sym_index(0, 0, 2))[p]));
      err = std::max(err, std::abs(d.values(sym_index(1, 1, 2))[p]));
      err = std::max(err, std::abs(w.values(tensor_index(0, 1, 2))[p] - expected));
      err = std::max(err, std::abs(w.values(tensor_index(1, 0, 2))[p] + expected));
    }
    CHECK(err < 1e-13);
  }

  SECTION("symmetric gradient has no vorticity") {
    const auto u = gradient(random_scalar_field(g, 4, 0.0, {1.0, 6.0}));
    CHECK(oracle::max_coefficient(vorticity(u)) <= 1e-12 * oracle::max_coefficient(gradient(u)));
  }

  SECTION("D + Ω = ∇u per mode to roundoff and tr D = div u") {
    const auto u = leray_project(random_vector_field(g, 6, 0.0, {1.0, 8.0}));
    const auto grad = gradient(u);
    const auto d = deformation(u);
    const auto w = vorticity(u);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const auto gij = grad.coefficients(tensor_index(i, j, 2));
        const auto dij = d.coefficients(sym_index(i, j, 2));
        const auto wij = w.coefficients(tensor_index(i, j, 2));
        const auto gji = grad.coefficients(tensor_index(j, i, 2));
        double worst = 0.0;
        for (std::size_t m = 0; m < gij.size(); ++m) {
          worst = std::max(worst, std::abs(dij[m] + wij[m] - gij[m]) /
                                     (1e-300 + std::abs(gij[m]) + std::abs(gji[m])));
        }
        CHECK(worst <= 4 * std::numeric_limits<double>::epsilon());
      }
    }
    ScalarField trace(g, Representation::spectral);
    for (int i = 0; i < 2; ++i) trace += [&] {
      ScalarField t(g, Representation::spectral);
      std::copy(d.coefficients(sym_index(i, i, 2)).begin(), d.coefficients(sym_index(i, i, 2)).end(),
                t.coefficients(0).begin());
      return t;
    }();
    CHECK(oracle::max_coefficient(trace) <= 1e-12 * oracle::max_coefficient(grad));
  }
}

TEST_CASE("Q bilinear form", "[operators]") {
  const Grid g(2, 32);
  const auto u = random_divfree_field(g, 1, 0.0, {1.0, 6.0});
  const auto grad_u = to_physical(gradient(u));

  SECTION("identity stress gives zero when b = 0") {
    SymTensorField tau(g, Representation::physical);
    for (int i = 0; i < 2; ++i) {
      auto v = tau.values(sym_index(i, i, 2));
      std::fill(v.begin(), v.end(), 3.0);
    }
    CHECK(max_abs(q_bilinear(tau, grad_u, 0.0)) < 1e-14);
  }

  SECTION("zero stress gives zero") {
    CHECK(max_abs(q_bilinear(SymTensorField(g, Representation::physical), grad_u, 0.7)) == 0.0);
  }

  SECTION("cyclic trace: <Q(τ,∇u), τ> = 0 when b = 0 (quadrature oracle)") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto tau = to_physical(random_symmetric_tensor(g, 100 + seed, 0.0, {1.0, 6.0}));
      const auto q = q_bilinear(tau, grad_u, 0.0);
      std::vector<double> integrand(g.physical_points());
      double scale = 0.0;
      for (std::size_t p = 0; p < integrand.size(); ++p) {
        double sum = 0.0;
        double mag = 0.0;
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) {
            sum += q.values(sym_index(i, j, 2))[p] * tau.values(sym_index(i, j, 2))[p];
            mag += std::abs(q.values(sym_index(i, j, 2))[p] * tau.values(sym_index(i, j, 2))[p]);
          }
        }
        integrand[p] = sum;
        scale += mag;
      }
      scale *= std::pow(oracle::kTwoPi / g.size(), 2);
      CHECK(std::abs(oracle::quadrature(g, integrand)) <= 1e-10 * scale);
      CHECK(std::abs(inner_l2(q, tau)) <= 1e-10 * scale);
    }
  }

  SECTION("bilinear in (τ, ∇u)") {
    const auto tau = to_physical(random_symmetric_tensor(g, 2, 0.0, {1.0, 6.0}));
    const auto q1 = q_bilinear(tau, grad_u, 0.4);
    const auto q2 = q_bilinear(2.0 * tau, 3.0 * grad_u, 0.4);
    CHECK(oracle::rel_diff(q2, 6.0 * q1) <= 1e-14);
  }
}

TEST_CASE("Dealiasing", "[operators]") {
  const Grid g(2, 32);
  const auto high = fourier_mode<ScalarShape>(g, {15, 0, 0}, 0, 1.0);
  CHECK(oracle::max_coefficient(dealias(high)) == 0.0);
  const auto low = fourier_mode<ScalarShape>(g, {1, 1, 0}, 0, 1.0);
  CHECK(dealias(low).identical(low));
  const auto f = random_scalar_field(g, 2, 0.0, {1.0, 15.0});
  CHECK(dealias(dealias(f)).identical(dealias(f)));
}

TEST_CASE("L2 inner products", "[operators]") {
  const Grid g(2, 32);
  const auto s = sampled_scalar(g, [](auto x) { return std::sin(x[0]); });
  const auto c = sampled_scalar(g, [](auto x) { return std::cos(x[0]); });
  CHECK_THAT(inner_l2(s, c), WithinAbs(0.0, 1e-12));
  CHECK_THAT(inner_l2(s, s), WithinRel(4.0 * kPi * kPi / 2.0, 1e-13));
  CHECK_THAT(inner_l2(to_spectral(s), to_spectral(s)), WithinRel(4.0 * kPi * kPi / 2.0, 1e-13));

  const auto a = random_symmetric_tensor(g, 1, 0.0, {1.0, 8.0});
  const auto b = random_symmetric_tensor(g, 2, 0.0, {1.0, 8.0});
  CHECK_THAT(inner_l2(to_physical(a), to_physical(b)), WithinRel(inner_l2(a, b), 1e-12));
  CHECK_THAT(inner_l2(a, b), WithinRel(inner_l2(b, a), 1e-15));
}

TEST_CASE("Random divergence-free fields", "[random]") {
  const Grid g(2, 32);
  const auto a = random_divfree_field(g, 42, -1.0, {1.0, 4.0});
  const auto b = random_divfree_field(g, 42, -1.0, {1.0, 4.0});
  CHECK(a.identical(b));
  CHECK(max_divergence(a) <= 1e-12);
  CHECK(has_zero_mean(a));

  const auto annulus = random_divfree_field(g, 3, 0.0, {1.0, 2.0});
  const auto& mag = modes(g).magnitude;
  for (int c = 0; c < 2; ++c) {
    const auto coeffs = annulus.coefficients(c);
    for (std::size_t m = 0; m < coeffs.size(); ++m) {
      if (std::abs(coeffs[m]) > 0.0) {
        CHECK(mag[m] >= 1.0);
        CHECK(mag[m] <= 2.0);
      }
    }
  }

  SECTION("the same seed describes the same function on a finer grid") {
    const Grid fine(2, 64);
    const auto af = to_physical(random_divfree_field(fine, 42, -1.0, {1.0, 4.0}));
    const auto ac = to_physical(a);
    double err = 0.0;
    for (std::size_t p = 0; p < g.physical_points(); ++p) {
      const std::size_t row = p / 32, col = p % 32;
      err = std::max(err, std::abs(ac.values(0)[p] - af.values(0)[(2 * row) * 64 + 2 * col]));
    }
    CHECK(err < 1e-12);
  }

  CHECK_THROWS_AS(random_divfree_field(g, 1, 0.0, {1.2, 1.3}), ContractViolation);
  CHECK_THROWS_AS(random_divfree_field(g, 1, 0.0, {3.0, 2.0}), ContractViolation);
}

TEST_CASE("Stress-velocity cancellation holds for solenoidal velocity", "[operators]") {
  const Grid g(2, 32);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto u = random_divfree_field(g, seed, 0.0, {1.0, 8.0});
    const auto tau = random_symmetric_tensor(g, seed + 1000, 0.0, {1.0, 8.0});
    const double a = inner_l2(leray_project(divergence(tau)), u);
    const double b = inner_l2(deformation(u), tau);
    CHECK(std::abs(a + b) <= 1e-10 * std::abs(a));
  }
}

TEST_CASE("Three-dimensional operators on a small grid", "[operators][3d]") {
  const Grid g(3, 16);
  const auto u = random_divfree_field(g, 5, 0.0, {1.0, 4.0});
  CHECK(max_divergence(u) <= 1e-12);
  const auto tau = random_symmetric_tensor(g, 6, 0.0, {1.0, 4.0});
  const double a = inner_l2(leray_project(divergence(tau)), u);
  const double b = inner_l2(deformation(u), tau);
  CHECK(std::abs(a + b) <= 1e-10 * std::abs(a));
  const auto q = q_bilinear(to_physical(tau), to_physical(gradient(u)), 0.0);
  CHECK(std::abs(inner_l2(q, to_physical(tau))) <= 1e-10 * norm_l2(q) * norm_l2(tau));
}

TEST_CASE("Field checkpoints", "[checkpoint]") {
  const Grid g(2, 16);
  const auto tau = random_symmetric_tensor(g, 77, 0.0, {1.0, 5.0});

  SECTION("bit-exact round trip in both representations") {
    std::stringstream buffer;
    write_record(buffer, to_record(tau));
    const auto back = from_record<SymTensorShape>(read_record(buffer));
    CHECK(back.identical(tau));

    const auto phys = to_physical(tau);
    std::stringstream buffer2;
    write_record(buffer2, to_record(phys));
    CHECK(from_record<SymTensorShape>(read_record(buffer2)).identical(phys));
  }

  SECTION("header layout") {
    std::stringstream buffer;
    write_record(buffer, to_record(tau));
    const std::string bytes = buffer.str();
    REQUIRE(bytes.size() == 4 + 2 + 1 + 8 + 1 + 2 + 3 * 16 * 9 * 16);
    CHECK(bytes.substr(0, 4) == "OLDB");
    CHECK(bytes[4] == 1);
    CHECK(bytes[5] == 0);
    CHECK(bytes[6] == 2);
    CHECK(static_cast<unsigned char>(bytes[7]) == 16);
    CHECK(bytes[15] == 1);
    CHECK(bytes[16] == 3);
    double first = 0.0;
    std::memcpy(&first, bytes.data() + 18, 8);
    CHECK(first == tau.coefficients(0)[0].real());
  }

  SECTION("rejects foreign data and mismatched types") {
    std::stringstream junk("NOPE0000000000000000");
    CHECK_THROWS_AS(read_record(junk), IoError);
    std::stringstream buffer;
    write_record(buffer, to_record(tau));
    CHECK_THROWS_AS(from_record<VectorShape>(read_record(buffer)), IoError);
  }

  SECTION("file round trip") {
    const auto path = std::filesystem::temp_directory_path() / "oldroyd_field_test.oldb";
    save_field(path, tau);
    CHECK(load_field<SymTensorShape>(path).identical(tau));
    std::filesystem::remove(path);
  }
}
