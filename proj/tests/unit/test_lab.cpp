#include <catch_amalgamated.hpp>

#include <oldroyd/lab.hpp>

#include <cmath>

#include "oracles.hpp"

using namespace oldroyd;
using namespace oldroyd::lab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Coefficient at an arbitrary integer wavevector, using Hermitian symmetry for
// the half that is not stored.
Complex coefficient(const VectorField& f, int c, std::array<int, 3> k) {
  if (auto m = mode_index(f.grid(), k)) return f.coefficients(c)[*m];
  const auto m = mode_index(f.grid(), {-k[0], -k[1], -k[2]});
  return m ? std::conj(f.coefficients(c)[*m]) : Complex{};
}

}  // namespace

TEST_CASE("Commutator with Λ^s", "[lab]") {
  const Grid g(2, 64);
  const auto u = random_divfree_field(g, 1, -1.0, {1.0, 8.0});
  const auto v = random_vector_field(g, 2, -1.0, {1.0, 8.0});

  SECTION("s = 0 vanishes") {
    CHECK(oracle::max_coefficient(commutator_lambda(u, v, 0.0)) <= 1e-12 * oracle::max_coefficient(v));
  }

  SECTION("bilinear") {
    const auto base = commutator_lambda(u, v, 1.5);
    CHECK(oracle::rel_diff(commutator_lambda(2.5 * u, v, 1.5), 2.5 * base) <= 1e-12);
    CHECK(oracle::rel_diff(commutator_lambda(u, -0.3 * v, 1.5), -0.3 * base) <= 1e-12);
    const auto v2 = random_vector_field(g, 3, 0.0, {1.0, 8.0});
    CHECK(oracle::rel_diff(commutator_lambda(u, v + v2, 1.5), base + commutator_lambda(u, v2, 1.5)) <= 1e-12);
  }

  SECTION("non-solenoidal advector is rejected") {
    CHECK_THROWS_AS(commutator_lambda(random_vector_field(g, 4, 0.0, {1.0, 8.0}), v, 1.0), ContractViolation);
  }

  SECTION("two-mode closed form") {
    // u = a e^{ik1·x} + c.c., v = b e^{ik2·x} + c.c. The commutator at q = p + r
    // picks up (|q|^s - |r|^s)(û_p · i r) v̂_r, summed over p ∈ ±k1, r ∈ ±k2.
    const std::array<int, 3> k1{2, 1, 0}, k2{-1, 3, 0};
    VectorField uu(g, Representation::spectral), vv(g, Representation::spectral);
    const double ek[2] = {-1.0 / std::sqrt(5.0), 2.0 / std::sqrt(5.0)};
    const Complex a(0.7, 0.4);
    const Complex b[2] = {Complex(0.2, -1.1), Complex(0.9, 0.3)};
    const double scale = g.physical_points();
    for (int c = 0; c < 2; ++c) {
      add_mode(g, k1, scale * a * ek[c], uu.coefficients(c));
      add_mode(g, k2, scale * b[c], vv.coefficients(c));
    }
    for (double s : {-1.0, 0.5, 1.0, 2.0, 2.7}) {
      const auto comm = commutator_lambda(uu, vv, s);
      double worst = 0.0, size = 0.0;
      for (int sp : {1, -1}) {
        for (int sr : {1, -1}) {
          const std::array<int, 3> p{sp * k1[0], sp * k1[1], 0}, r{sr * k2[0], sr * k2[1], 0};
          const std::array<int, 3> q{p[0] + r[0], p[1] + r[1], 0};
          const double qn = std::hypot(q[0], q[1]), rn = std::hypot(r[0], r[1]);
          for (int c = 0; c < 2; ++c) {
            Complex up_dot_r{};
            for (int a2 = 0; a2 < 2; ++a2) up_dot_r += coefficient(uu, a2, p) * static_cast<double>(r[a2]);
            const Complex expected = (std::pow(qn, s) - std::pow(rn, s)) * Complex(0, 1) * up_dot_r *
                                     coefficient(vv, c, r) / scale;
            worst = std::max(worst, std::abs(coefficient(comm, c, q) - expected));
            size = std::max(size, std::abs(expected));
          }
        }
      }
      CHECK(worst <= 1e-12 * size);
    }
  }
}

TEST_CASE("Besov commutator ratio", "[lab]") {
  const Grid g(2, 64);
  const auto u = random_divfree_field(g, 5, -1.0, {1.0, 8.0});
  const auto v = random_vector_field(g, 6, -1.0, {1.0, 8.0});

  CHECK(besov_commutator_ratio(u, v, 0.0).ratio <= 1e-12);
  for (double s : {-1.0, 1.0, 2.0, 2.5}) {
    const auto r = besov_commutator_ratio(u, v, s);
    CHECK(std::isfinite(r.ratio));
    CHECK(r.ratio > 0.0);
    CHECK(r.lhs >= 0.0);
    CHECK_THAT(besov_commutator_ratio(3.0 * u, 0.2 * v, s).ratio, WithinRel(r.ratio, 1e-12));
  }
  CHECK_THROWS_AS(besov_commutator_ratio(u, v, -1.5), ContractViolation);
  CHECK_THROWS_AS(besov_commutator_ratio(u, v, 3.0), ContractViolation);

  // Endpoint s = n/2: same band-limited pair on three grids.
  std::vector<double> ratios;
  for (int size : {64, 128, 256}) {
    const Grid gg(2, size);
    ratios.push_back(besov_commutator_ratio(random_divfree_field(gg, 5, -1.0, {1.0, 8.0}),
                                    random_vector_field(gg, 6, -1.0, {1.0, 8.0}), 1.0)
                         .ratio);
  }
  CHECK(std::isfinite(ratios[0]));
  CHECK_THAT(ratios[1], WithinRel(ratios[0], 0.25));
  CHECK_THAT(ratios[2], WithinRel(ratios[1], 0.25));
}

TEST_CASE("Block commutator ledger", "[lab]") {
  const Grid g(2, 64);
  const auto cutoff = lp::DyadicCutoff::for_grid(g);
  const auto u = random_divfree_field(g, 7, -1.0, {1.0, 2.0});

  SECTION("u = 0") {
    const auto v = random_vector_field(g, 8, 0.0, {1.0, 8.0});
    const auto rep = block_commutator_check(VectorField(g, Representation::spectral), v, 1.0);
    for (const auto& e : rep.ledger) CHECK(e.weighted == 0.0);
    CHECK(rep.summed.ratio == 0.0);
  }

  SECTION("quasi-locality for a single-band v") {
    // v in band 3 (|k| between 6 and 10.6), u at |k| <= 2.
    const auto v = lp::dyadic_block(random_vector_field(g, 9, 0.0, {6.0, 10.6}), 3, cutoff).field;
    const auto rep = block_commutator_check(u, v, 0.0);
    double top = 0.0;
    for (const auto& e : rep.ledger) top = std::max(top, e.weighted);
    REQUIRE(top > 0.0);
    for (const auto& e : rep.ledger) {
      if (std::abs(e.j - 3) > 2) CHECK(e.weighted <= 1e-12 * top);
    }
  }

  SECTION("summable ledger on random data") {
    const auto uu = random_divfree_field(g, 10, -1.0, {1.0, 8.0});
    const auto v = random_vector_field(g, 11, -1.0, {1.0, 8.0});
    for (double s : {-1.5, 0.0, 1.0, 2.0}) {
      const auto rep = block_commutator_check(uu, v, s);
      CHECK(std::isfinite(rep.summed.ratio));
      double total = 0.0;
      for (const auto& e : rep.ledger) total += e.weighted;
      CHECK_THAT(total, WithinRel(rep.summed.lhs, 1e-14));
      CHECK(rep.ledger.back().weighted <= 0.01 * total);
    }
    CHECK_THROWS_AS(block_commutator_check(uu, v, 2.5), ContractViolation);
    CHECK_THROWS_AS(block_commutator_check(uu, v, -2.0), ContractViolation);
  }
}

TEST_CASE("Kato-Ponce ratio", "[lab]") {
  const Grid g(2, 64);
  const auto u = random_divfree_field(g, 12, -1.0, {1.0, 8.0});
  const auto v = random_vector_field(g, 13, -1.0, {1.0, 8.0});
  CHECK(kato_ponce_ratio(u, v, 0.0).ratio <= 1e-13);
  for (double s : {1.0, 2.0, 3.0}) {
    const auto r = kato_ponce_ratio(u, v, s);
    CHECK(std::isfinite(r.ratio));
    CHECK(r.ratio > 0.0);
    CHECK_THAT(kato_ponce_ratio(4.0 * u, 4.0 * v, s).ratio, WithinRel(r.ratio, 1e-12));
  }
  const auto band = random_divfree_field(g, 14, 0.0, {3.0, 5.0});
  CHECK(std::isfinite(kato_ponce_ratio(band, band, 2.0).ratio));
  CHECK_THROWS_AS(kato_ponce_ratio(u, v, -0.5), ContractViolation);
}

TEST_CASE("Bony decomposition", "[lab]") {
  const Grid g(2, 64);
  const auto cutoff = lp::DyadicCutoff::for_grid(g);
  const auto u = random_scalar_field(g, 15, -1.0, {1.0, 20.0});
  CHECK(bony_check(u, ScalarField(g, Representation::spectral)) == 0.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = random_scalar_field(g, 100 + seed, -1.0, {1.0, 20.0});
    const auto b = random_scalar_field(g, 200 + seed, 0.0, {1.0, 20.0});
    CHECK(bony_check(a, b) <= 1e-10);
  }
  // Pieces are individually meaningful: the remainder of two well separated bands vanishes.
  const auto low = random_scalar_field(g, 16, 0.0, {1.0, 1.4});
  const auto high = random_scalar_field(g, 17, 0.0, {12.0, 20.0});
  const auto pieces = bony_decomposition(low, high, cutoff);
  CHECK(norm_l2(pieces.remainder) <= 1e-14 * norm_l2(pieces.product));
  CHECK(norm_l2(pieces.paraproduct_vu) <= 1e-14 * norm_l2(pieces.product));

  // Edge-band probe: dropping the top band leaves part of the spectrum uncovered.
  const lp::DyadicCutoff truncated(cutoff.j_min(), 3);
  const auto a = random_scalar_field(g, 18, 0.0, {1.0, 20.0});
  const auto b = random_scalar_field(g, 19, 0.0, {1.0, 20.0});
  CHECK(bony_decomposition(a, b, truncated).residual > 1e-3);
  const auto inside = random_scalar_field(g, 20, 0.0, {1.0, 4.0});
  CHECK(bony_decomposition(inside, inside, truncated).residual <= 1e-10);
}

TEST_CASE("Ensembles", "[lab]") {
  EnsembleSpec spec;
  spec.grid = Grid(2, 32);
  spec.field_band = {1.0, 6.0};
  spec.seeds = {3, 1, 4, 1, 5};
  spec.s_values = {-1.0, 0.0, 1.0};

  const auto serial = run_ensemble(spec, 1);
  const auto threaded = run_ensemble(spec, 3);
  REQUIRE(serial.samples.size() == 15);
  for (std::size_t i = 0; i < serial.samples.size(); ++i) {
    CHECK(serial.samples[i].seed == threaded.samples[i].seed);
    CHECK(serial.samples[i].s == threaded.samples[i].s);
    CHECK(serial.samples[i].ratio == threaded.samples[i].ratio);
  }
  CHECK(serial.samples[0].seed == 3);
  CHECK(serial.samples[5].s == 0.0);
  CHECK(serial.max_ratio[1] <= 1e-12);
  CHECK(serial.all_finite);
  CHECK(refinement_change(serial, threaded) == 0.0);

  auto bad = spec;
  bad.s_values = {3.5};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = spec;
  bad.seeds.clear();
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = spec;
  bad.field_band = {1.0, 12.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = spec;
  bad.inequality = Inequality::kato_ponce;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK(parse_inequality("kato_ponce") == Inequality::kato_ponce);
}
