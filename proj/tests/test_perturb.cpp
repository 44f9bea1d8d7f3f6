#include <doctest.h>

#include "wavemap/data.hpp"
#include "wavemap/evolve.hpp"
#include "wavemap/perturb.hpp"

#include <cmath>

using namespace wavemap;

namespace {

BumpProfile zero_pair() {
  BumpProfile p;
  p.half_width = 1.0;
  p.components = {ScalarBump(1.0, Polynomial({0.0})), ScalarBump(1.0, Polynomial({0.0}))};
  p.id = "zero";
  return p;
}

SphereSlice evolved(double eps, double h, double t) {
  EvolveOptions o;
  o.h_step = h;
  o.t_final = t;
  return evolve(default_spec(1.0, eps, 3), o).slices.back();
}

}  // namespace

TEST_SUITE("perturb") {
  TEST_CASE("quadrature identities") {
    const auto q = quadratures_ABDE(make_bump_pair(1.0));
    CHECK(std::abs(q.B + q.A) <= 1e-10 * q.scale_AB);
    CHECK(std::abs(q.D + 0.5 * q.E) <= 1e-10 * q.scale_DE);
    CHECK(std::abs(q.da_sum() - 0.5 * q.A * q.E) <= 1e-10 * q.scale_AB * q.scale_DE);
    CHECK(q.A == doctest::Approx(0.1494362065).epsilon(1e-8));
  }

  TEST_CASE("mean-zero eliminations vanish") {
    const auto r = mean_zero_eliminations(make_bump_pair(1.0));
    REQUIRE(r.values.size() == 6);
    for (double v : r.values) CHECK(std::abs(v) < 1e-10);
  }

  TEST_CASE("H(C) is antisymmetric") {
    const PerturbationSeries s(make_bump_pair(1.0));
    const auto& H = s.H_C();
    REQUIRE(H.size() == 4);
    CHECK(std::abs(H[0]) < 1e-10);
    CHECK(std::abs(H[3]) < 1e-10);
    CHECK(std::abs(H[1] + H[2]) < 1e-10);
    CHECK(std::abs(H[1]) > 1e-3);
    for (double v : s.H(-1.0)) CHECK(v == 0.0);
  }

  TEST_CASE("lemma record") {
    const auto r = check_lemma_record(PerturbationSeries(make_bump_pair(1.0)));
    CHECK(r.residual <= 1e-9 * r.scale);
    const auto z = check_lemma_record(PerturbationSeries(zero_pair()));
    CHECK(z.residual == 0.0);
  }

  TEST_CASE("diagonal boundary values") {
    const PerturbationSeries s(make_bump_pair(1.0));
    for (double u : {-0.8, -0.25, 0.0, 0.4, 0.9}) {
      const auto h = s.bump().value(u);
      const double h2 = h[0] * h[0] + h[1] * h[1];
      const auto p1 = s.phi1(u, u);
      const auto p2 = s.phi2(u, u);
      const auto p3 = s.phi3(u, u);
      CHECK(p1[0] == 0.0);
      CHECK(p1[1] == doctest::Approx(h[0]).epsilon(1e-14));
      CHECK(p1[2] == doctest::Approx(h[1]).epsilon(1e-14));
      CHECK(p2[0] == doctest::Approx(-0.5 * h2).epsilon(1e-14));
      CHECK(std::abs(p2[1]) + std::abs(p2[2]) == 0.0);
      CHECK(std::abs(p3[0]) < 1e-15);
      CHECK(p3[1] == doctest::Approx(-h2 * h[0] / 6.0).epsilon(1e-12));
      CHECK(p3[2] == doctest::Approx(-h2 * h[1] / 6.0).epsilon(1e-12));
    }
  }

  TEST_CASE("hierarchy residuals converge") {
    const PerturbationSeries s(make_bump_pair(1.0));
    for (int order : {1, 2}) CHECK(check_hierarchy(s, order, 256) < 1e-10);
    const double a = check_hierarchy(s, 3, 256);
    const double b = check_hierarchy(s, 3, 512);
    CHECK(a / b == doctest::Approx(4.0).epsilon(0.2));
    CHECK(check_hierarchy(PerturbationSeries(zero_pair()), 3, 64) == 0.0);
  }

  TEST_CASE("quintic coefficient") {
    const PerturbationSeries s(make_bump_pair(1.0));
    const auto q = quadratures_ABDE(s.bump());
    const auto closed = predicted_alpha_coefficient(q, 3);
    const auto quad5 = quintic_coefficient_by_quadrature(s);
    REQUIRE(quad5.size() == 3);
    CHECK(closed[1] == doctest::Approx(kAlphaKappa * q.A * q.E).epsilon(1e-14));
    CHECK(quad5[1] == doctest::Approx(closed[1]).epsilon(1e-6));
    CHECK(std::abs(quad5[0]) < 1e-12);
    Quadratures z = q;
    z.A = 0.0;
    CHECK(predicted_alpha_coefficient(z, 3)[1] == 0.0);
    z = q;
    z.E = 0.0;
    CHECK(predicted_alpha_coefficient(z, 3)[1] == 0.0);
  }

  TEST_CASE("degenerate pairs are rejected") {
    CHECK_THROWS_AS(quadratures_ABDE(zero_pair()), NumericalError);
  }

  TEST_CASE("parity in eps and the first-order term") {
    const double h = 1.0 / 128.0;
    const auto bump = make_bump_pair(1.0);
    const auto z = parity_check(evolved(0.0, h, 1.5), evolved(0.0, h, 1.5), 0.0, bump);
    CHECK(z.odd_e1 == 0.0);
    CHECK(z.even_perp == 0.0);
    CHECK(z.phi1_error == 0.0);
    const auto a = parity_check(evolved(0.1, h, 1.5), evolved(-0.1, h, 1.5), 0.1, bump);
    const auto b = parity_check(evolved(0.05, h, 1.5), evolved(-0.05, h, 1.5), 0.05, bump);
    CHECK(a.odd_e1 < 1e-14);
    CHECK(a.even_perp < 1e-14);
    CHECK(a.phi1_error / b.phi1_error == doctest::Approx(4.0).epsilon(0.2));
  }
}
