#include <doctest.h>

#include "wavemap/data.hpp"
#include "wavemap/evolve.hpp"
#include "wavemap/profile.hpp"

#include <cmath>

using namespace wavemap;

namespace {

Evolution run(const DataSpec& spec, double h, double t) {
  EvolveOptions o;
  o.h_step = h;
  o.t_final = t;
  o.slice_times = {0.5 * t};
  return evolve(spec, o);
}

std::vector<double> minus_e1(std::vector<double> a) {
  a[0] -= 1.0;
  return a;
}

}  // namespace

TEST_SUITE("profile") {
  TEST_CASE("constant data gives a trivial profile") {
    const auto ev = run(default_spec(1.0, 0.0, 3), 1.0 / 32.0, 2.0);
    const auto p = extract_profile(ev.slices.back(), 1.0);
    CHECK(p.residual == 0.0);
    CHECK(norm(minus_e1(p.alpha)) == 0.0);
    for (double v : minus_e1(p.F_at(0.3))) CHECK(v == 0.0);
    const auto s = synthesize_slice(p, 50.0);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(distance(s.at(i), unit_vector(3, 0)) == 0.0);
  }

  TEST_CASE("circle loops leave alpha at e1 within scheme error") {
    for (double eps : {0.1, 0.4}) {
      const auto spec = default_spec(1.0, eps, 2);
      const auto ev = run(spec, 1.0 / 128.0, 2.0);
      const auto& s = ev.slices.back();
      const auto p = extract_profile(s, 1.0);
      const auto exact = circle_exact([&](double x) { return eps * spec.bump.components[0](x); }, s.grid(), 2.0);
      double err = 0.0;
      for (std::size_t i = 0; i < s.size(); ++i) err = std::max(err, distance(s.at(i), exact.at(i)));
      CHECK(norm(minus_e1(p.alpha)) <= err);
    }
  }

  TEST_CASE("sphere target shifts alpha at fifth order") {
    const auto ev = run(default_spec(1.0, 0.3, 3), 1.0 / 256.0, 2.0);
    const auto p = extract_profile(ev.slices.back(), 1.0);
    const double c5 = std::hypot(1.0855e-4, 6.8993e-5);
    CHECK(norm(minus_e1(p.alpha)) == doctest::Approx(c5 * std::pow(0.3, 5)).epsilon(0.05));
    const auto cons = consistency_check(ev, p);
    CHECK(cons.interior_deviation < 1e-12);
  }

  TEST_CASE("synthesis at T0 reproduces the evolved slice") {
    const auto ev = run(default_spec(1.0, 0.3, 3), 1.0 / 128.0, 3.0);
    const auto& s = ev.slices.back();
    const auto p = extract_profile(s, 1.0);
    const auto y = synthesize_slice(p, 3.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
      const auto k = s.grid().find(y.grid().node(i));
      REQUIRE(k.has_value());
      CHECK(distance(y.at(i), s.at(*k)) <= p.residual + 1e-15);
    }
  }

  TEST_CASE("doubling T translates the strips") {
    const auto ev = run(default_spec(1.0, 0.3, 3), 1.0 / 64.0, 2.0);
    const auto p = extract_profile(ev.slices.back(), 1.0);
    const auto a = synthesize_slice(p, 10.0);
    const auto b = synthesize_slice(p, 20.0);
    const double h = p.s_grid.spacing();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double x = a.grid().node(i);
      if (std::abs(std::abs(x) - 10.0) > 1.0) continue;
      const auto k = b.grid().find(x + (x < 0 ? -10.0 : 10.0));
      REQUIRE(k.has_value());
      CHECK(distance(a.at(i), b.at(*k)) == 0.0);
    }
    CHECK(h == 1.0 / 64.0);
  }

  TEST_CASE("extraction before the strips separate is rejected") {
    const auto ev = run(default_spec(1.0, 0.3, 3), 1.0 / 64.0, 1.0);
    CHECK_THROWS_AS(extract_profile(ev.slices.back(), 1.0), InputError);
  }
}
