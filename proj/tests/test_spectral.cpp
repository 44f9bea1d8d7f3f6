#include <doctest.h>

#include "wavemap/data.hpp"
#include "wavemap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace wavemap;

namespace {

// Profile on the circle whose strips rotate e1 to alpha = (cos a, sin a).
AsymptoticProfile rotating_profile(double a, double h = 1.0 / 64.0) {
  AsymptoticProfile p;
  p.half_width = 1.0;
  p.m = 2;
  const auto n = static_cast<std::size_t>(std::lround(2.0 / h)) + 1;
  p.s_grid = Grid1D::from_spacing(-1.0, h, n);
  const auto bump = ScalarBump::symmetric(1.0);
  const auto ramp = cumquad([&](double x) { return bump(x); }, -1.0, p.s_grid, 4);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = a * ramp[i] / ramp.back();
    for (auto* v : {&p.F, &p.G}) {
      v->push_back(std::cos(th));
      v->push_back(std::sin(th));
    }
  }
  p.alpha = {std::cos(a), std::sin(a)};
  return p;
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("constant slice has zero norms") {
    const SphereSlice s = [] {
      SphereSlice x(Grid1D(-2.0, 2.0, 129), 3, 0.0);
      for (std::size_t i = 0; i < x.size(); ++i) x.at(i)[0] = 1.0;
      return x;
    }();
    CHECK(sobolev_norm(s, 0.5) == 0.0);
    const auto b = besov_norm(s);
    CHECK(b.norm == 0.0);
    for (const auto& bl : b.blocks) CHECK(bl.value == 0.0);
  }

  TEST_CASE("Hdot half is invariant under rescaling") {
    const auto base = default_spec(1.0, 0.3, 3);
    const double n0 = sobolev_norm(build_initial_data(base, symmetric_grid(1.0 / 128.0, 1.5)), 0.5);
    for (double lam : {2.0, 4.0}) {
      // g(x / lam) sampled at the same number of points per unit of x / lam
      SphereSlice s(symmetric_grid(lam / 128.0, 1.5 * lam), 3, 0.0);
      for (std::size_t i = 0; i < s.size(); ++i) {
        const auto f = initial_value(base, std::clamp(s.grid().node(i) / lam, -1.0, 1.0));
        std::copy(f.begin(), f.end(), s.at(i).begin());
      }
      CHECK(sobolev_norm(s, 0.5) == doctest::Approx(n0).epsilon(0.01));
    }
  }

  TEST_CASE("single-block function has one Besov term") {
    const int j = 2;
    const double xi0 = 1.5 * std::ldexp(1.0, j);
    SphereSlice s(Grid1D(-20.0, 20.0, 4097), 2, 0.0);
    double l2 = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double x = s.grid().node(i);
      s.at(i)[0] = 1.0;
      s.at(i)[1] = std::exp(-x * x / 16.0) * std::cos(2.0 * std::numbers::pi * xi0 * x);
      l2 += s.at(i)[1] * s.at(i)[1] * s.grid().spacing();
    }
    DftOptions o = norm_dft_options();
    o.tail_tol = 1e-9;
    const auto b = besov_norm(s, 0.5, o);
    for (const auto& bl : b.blocks)
      if (bl.j != j) CHECK(bl.value < 1e-8);
    CHECK(b.norm == doctest::Approx(std::sqrt(std::ldexp(1.0, j) * l2)).epsilon(1e-8));
  }

  TEST_CASE("slices that do not return to e1 are rejected") {
    SphereSlice s(Grid1D(-1.0, 1.0, 33), 2, 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) s.at(i)[1] = 1.0;
    CHECK_THROWS_AS(sobolev_norm(s, 0.5), InputError);
  }

  TEST_CASE("norms grow logarithmically when alpha differs from e1") {
    const double a = 0.3;
    const auto p = rotating_profile(a, 1.0 / 16.0);
    const double d2 = 2.0 - 2.0 * std::cos(a);  // |alpha - e1|^2
    std::vector<double> lt, h2, bv, lb;
    for (double T : {256.0, 1024.0, 4096.0, 16384.0}) {
      const auto r = compute_norms(synthesize_slice(p, T), &p);
      REQUIRE(r.lower_bound.has_value());
      CHECK(*r.lower_bound <= r.hdot_half * r.hdot_half);
      lt.push_back(std::log(T));
      h2.push_back(r.hdot_half * r.hdot_half);
      bv.push_back(r.besov);
      lb.push_back(*r.lower_bound);
    }
    const auto fh = fit_line(lt, h2);
    const auto fb = fit_line(lt, bv);
    const auto fl = fit_line(lt, lb);
    CHECK(fh.r_squared > 0.999);
    CHECK(fb.r_squared > 0.99);
    CHECK(fh.slope == doctest::Approx(2.0 * d2 / std::numbers::pi).epsilon(0.05));
    CHECK(fl.slope == doctest::Approx(d2 / std::numbers::pi).epsilon(0.05));
  }

  TEST_CASE("lower bound stays bounded when alpha is e1") {
    auto p = rotating_profile(0.3);
    // strips that leave e1 and come back: alpha = e1
    for (std::size_t i = 0; i < p.s_grid.size(); ++i) {
      const double th = 0.3 * ScalarBump::symmetric(1.0)(p.s_grid.node(i));
      p.F[2 * i] = p.G[2 * i] = std::cos(th);
      p.F[2 * i + 1] = p.G[2 * i + 1] = std::sin(th);
    }
    p.alpha = {1.0, 0.0};
    const double a = lower_bound_integral(p, 1000.0);
    const double b = lower_bound_integral(p, 100000.0);
    // a rotation by the same angle would add (|alpha - e1|^2 / pi) ln 100
    const double growth = (2.0 - 2.0 * std::cos(0.3)) / std::numbers::pi * std::log(100.0);
    CHECK(std::abs(b - a) < 1e-3 * growth);
  }

  TEST_CASE("lower bound rejects an empty window") {
    const auto p = rotating_profile(0.3);
    CHECK_THROWS_AS(lower_bound_integral(p, 50.0), InputError);
  }

  TEST_CASE("Heaviside demo") {
    const auto zero = ScalarBump(1.0, Polynomial({0.0}));
    const auto z = heaviside_demo(zero, -6, 0, 4);
    for (const auto& bl : z.blocks) CHECK(bl.value == 0.0);
    for (double w : z.w) CHECK(w == 0.0);

    const auto r = heaviside_demo(ScalarBump::asymmetric(1.0));
    REQUIRE(r.blocks.size() >= 4);
    for (std::size_t k = 0; k < 4; ++k)
      CHECK(r.blocks[k].value == doctest::Approx(r.predicted_block_value).epsilon(0.1));
    CHECK(r.predicted_block_value > 0.0);
    CHECK(r.partial_sum_fit.slope == doctest::Approx(r.predicted_block_value).epsilon(0.1));
  }
}
