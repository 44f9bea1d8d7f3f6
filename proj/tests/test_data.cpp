#include <doctest.h>

#include "wavemap/data.hpp"

#include <cmath>
#include <numbers>

using namespace wavemap;

namespace {

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_SUITE("data") {
  TEST_CASE("symmetric bump cannot produce the obstruction") {
    const auto h = ScalarBump::symmetric(1.0);
    CHECK(std::abs(cubic_moment(h)) < 1e-14);
    CHECK_THROWS_AS(make_bump_pair(h, "even"), InputError);
  }

  TEST_CASE("default pair has nonzero cubic moment equal to E") {
    const auto pair = make_bump_pair(1.0);
    REQUIRE(pair.target_dim() == 2);
    const double e = cubic_moment(pair.components[1]);
    CHECK(e == doctest::Approx(-0.04649094).epsilon(1e-6));
    const double h2_h3 = quad(
        [&](double x) {
          const double a = pair.components[0](x);
          return a * a * pair.components[1].derivative(x, 1);
        },
        -1.0, 1.0, 512);
    CHECK(h2_h3 == doctest::Approx(e).epsilon(1e-12));
  }

  TEST_CASE("zero amplitude gives e1") {
    auto spec = default_spec(1.0, 0.0, 3);
    for (double x : {-0.7, 0.0, 0.4}) CHECK(max_diff(initial_value(spec, x), {1.0, 0.0, 0.0}) == 0.0);
  }

  TEST_CASE("closed form turns e1 onto the bump direction") {
    // At the peak of h3, h2 = h3' = 0 and h points along e3.
    auto spec = default_spec(1.0, 0.3, 3);
    const auto& h3 = spec.bump.components[1];
    double lo = -1.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (h3.derivative(mid, 1) > 0 ? lo : hi) = mid;
    }
    const double x0 = 0.5 * (lo + hi);
    spec.eps = std::numbers::pi / (2.0 * h3(x0));
    const auto f = initial_value(spec, x0);
    CHECK(std::abs(f[0]) < 1e-12);
    CHECK(std::abs(f[1]) < 1e-12);
    CHECK(f[2] == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("data is sphere valued and supported in [-C, C]") {
    const auto spec = default_spec(2.0, 0.4, 4);
    const auto f = build_initial_data(spec, symmetric_grid(1.0 / 64.0, 3.0));
    CHECK(f.max_norm_defect() < 1e-15);
    const auto rep = smallness_check(f, spec);
    CHECK(rep.support_leak == 0.0);
  }

  TEST_CASE("truncated series differs from the closed form at fifth order") {
    std::vector<double> le, ld;
    for (double eps : {0.02, 0.04, 0.08, 0.16}) {
      auto closed = default_spec(1.0, eps, 3);
      auto trunc = closed;
      trunc.truncation = 4;
      double d = 0.0;
      for (int k = -50; k <= 50; ++k) d = std::max(d, max_diff(initial_value(closed, k / 50.0), initial_value(trunc, k / 50.0)));
      le.push_back(std::log(eps));
      ld.push_back(std::log(d));
    }
    CHECK(fit_line(le, ld).slope == doctest::Approx(5.0).epsilon(0.02));
  }

  TEST_CASE("smallness scales linearly in eps") {
    const auto g = symmetric_grid(1.0 / 256.0, 1.1);
    const auto s1 = default_spec(1.0, 0.1, 3);
    const auto s4 = default_spec(1.0, 0.4, 3);
    const auto r1 = smallness_check(build_initial_data(s1, g), s1);
    const auto r4 = smallness_check(build_initial_data(s4, g), s4);
    double hmax = 0.0;
    for (int k = -200; k <= 200; ++k) hmax = std::max(hmax, norm(s1.bump.value(k / 200.0)));
    CHECK(r1.max_deviation <= 0.2 * hmax);
    CHECK(r1.ok);
    CHECK(r4.max_deviation / r1.max_deviation == doctest::Approx(4.0).epsilon(0.05));
  }

  TEST_CASE("constant data has zero deviation") {
    auto spec = default_spec(1.0, 0.0, 3);
    const auto r = smallness_check(build_initial_data(spec, symmetric_grid(0.01, 1.2)), spec);
    CHECK(r.max_deviation == 0.0);
  }

  TEST_CASE("inconsistent specs are rejected") {
    auto spec = default_spec(1.0, 0.3, 3);
    spec.m = 4;
    CHECK_THROWS_AS(spec.validate(), InputError);
    CHECK_THROWS_AS(default_spec(1.0, 0.9, 3).validate(), InputError);
    CHECK_THROWS_AS(default_spec(-1.0, 0.3, 3).validate(), InputError);
  }
}
