#include <doctest.h>

#include "wavemap/bump.hpp"
#include "wavemap/core.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace wavemap;

TEST_SUITE("core") {
  TEST_CASE("quad of a constant is exact") { CHECK(quad([](double) { return 1.0; }, 0.0, 1.0, 64) == 1.0); }

  TEST_CASE("quad of a periodic sine vanishes") {
    const double v = quad([](double x) { return std::sin(2.0 * std::numbers::pi * x); }, 0.0, 1.0, 64);
    CHECK(std::abs(v) < 1e-12);
  }

  TEST_CASE("quad of an exact derivative vanishes") {
    const auto h3 = ScalarBump::asymmetric(1.0);
    const double v = quad([&](double x) { return h3.derivative(x, 1) * h3(x); }, -1.0, 1.0, 256);
    CHECK(std::abs(v) < 1e-12);
  }

  TEST_CASE("quad reports a non-finite sample") {
    CHECK_THROWS_AS(quad([](double x) { return x > 0.5 ? std::nan("") : 0.0; }, 0.0, 1.0, 8), NumericalError);
  }

  TEST_CASE("cumquad of zero is zero and of h3' is h3") {
    const auto h3 = ScalarBump::asymmetric(1.0);
    const Grid1D g(-1.0, 1.0, 201);
    for (double v : cumquad([](double) { return 0.0; }, -1.0, g)) CHECK(v == 0.0);
    const auto c = cumquad([&](double x) { return h3.derivative(x, 1); }, -1.0, g, 4);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(c[i] - h3(g.node(i))) < 1e-12);
  }

  TEST_CASE("cumquad rejects a grid that does not start at a") {
    const Grid1D g(0.0, 1.0, 11);
    CHECK_THROWS_AS(cumquad([](double) { return 1.0; }, -1.0, g), InputError);
  }

  TEST_CASE("zero field has zero density") {
    const Grid1D g(-2.0, 2.0, 129);
    const std::vector<double> v(g.size(), 0.0);
    const auto d = dft_halfline_density(g, v, 1);
    for (double x : d.density) CHECK(x == 0.0);
  }

  TEST_CASE("Gaussian transforms to a Gaussian") {
    const Grid1D g(-8.0, 8.0, 1025);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::exp(-std::numbers::pi * g.node(i) * g.node(i));
    const auto d = dft_halfline_density(g, v, 1);
    for (std::size_t k = 0; k < d.density.size() && d.xi(k) < 3.0; ++k) {
      const double e = std::exp(-2.0 * std::numbers::pi * d.xi(k) * d.xi(k));
      CHECK(std::abs(d.density[k] - e) < 1e-8);
    }
  }

  TEST_CASE("Parseval on random compactly supported profiles") {
    std::mt19937_64 rng(20241);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const Grid1D g(-4.0, 4.0, 513);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> v(g.size() * 2, 0.0);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.node(i);
        if (std::abs(x) > 3.0) continue;
        const double w = std::exp(-1.0 / (1.0 - x * x / 9.0));
        v[2 * i] = w * U(rng);
        v[2 * i + 1] = w * U(rng);
      }
      double l2 = 0.0;
      for (double x : v) l2 += x * x * g.spacing();
      const auto d = dft_halfline_density(g, v, 2);
      const double spec = d.integrate([](double) { return 1.0; });
      CHECK(spec == doctest::Approx(l2).epsilon(1e-10));
    }
  }

  TEST_CASE("non-decaying tails are rejected") {
    const Grid1D g(-1.0, 1.0, 65);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = g.node(i);
    CHECK_THROWS_AS(dft_halfline_density(g, v, 1), InputError);
  }

  TEST_CASE("direct transform agrees with the FFT density") {
    const Grid1D g(-4.0, 4.0, 257);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::exp(-3.0 * (g.node(i) - 0.3) * (g.node(i) - 0.3));
    const auto d = dft_halfline_density(g, v, 1);
    const std::vector<double> xis{d.xi(3), d.xi(17)};
    const auto t = direct_transform(g, v, 1, xis);
    CHECK(std::norm(t[0]) == doctest::Approx(d.density[3]).epsilon(1e-9));
    CHECK(std::norm(t[1]) == doctest::Approx(d.density[17]).epsilon(1e-9));
  }

  TEST_CASE("line fit recovers an exact line") {
    const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
    const auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r_squared == doctest::Approx(1.0));
  }

  TEST_CASE("grid nodes are exact multiples") {
    const auto g = Grid1D::centered(0.125, 8);
    CHECK(g.size() == 17);
    CHECK(g.node(8) == 0.0);
    CHECK(g.find(0.5).value() == 12);
    CHECK_FALSE(g.find(0.51).has_value());
  }
}
