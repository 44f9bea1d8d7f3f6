#include "wavemap/profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wavemap {

namespace {

std::vector<double> e1(int m) { return unit_vector(m, 0); }

// Profile sample at s, with e1 to the left of the grid and `right` to the right.
std::vector<double> sample(const AsymptoticProfile& p, const std::vector<double>& samples, double s,
                           const std::vector<double>& right) {
  const auto& g = p.s_grid;
  const int m = p.m;
  if (s <= g.x_min()) return e1(m);
  if (s >= g.x_max()) return right;
  std::vector<double> out(static_cast<std::size_t>(m));
  if (auto k = g.find(s, 1e-9)) {
    std::copy_n(samples.begin() + static_cast<long>(*k * m), m, out.begin());
    return out;
  }
  // 4-point Lagrange interpolation, stencil clamped to the grid
  const double r = (s - g.x_min()) / g.spacing();
  long i0 = static_cast<long>(std::floor(r)) - 1;
  i0 = std::clamp<long>(i0, 0, static_cast<long>(g.size()) - 4);
  const double t = r - static_cast<double>(i0);
  const double w[4] = {-(t - 1) * (t - 2) * (t - 3) / 6.0, t * (t - 2) * (t - 3) / 2.0,
                       -t * (t - 1) * (t - 3) / 2.0, t * (t - 1) * (t - 2) / 6.0};
  std::fill(out.begin(), out.end(), 0.0);
  for (int q = 0; q < 4; ++q)
    for (int c = 0; c < m; ++c) out[c] += w[q] * samples[static_cast<std::size_t>((i0 + q) * m + c)];
  const double r2 = norm(out);
  for (auto& v : out) v /= r2;
  return out;
}

}  // namespace

std::vector<double> AsymptoticProfile::F_at(double s) const { return sample(*this, F, s, alpha); }
std::vector<double> AsymptoticProfile::G_at(double s) const { return sample(*this, G, s, alpha); }

AsymptoticProfile extract_profile(const SphereSlice& slice, double half_width, const ExtractOptions& opts) {
  const double c = half_width;
  const double t0 = slice.time();
  const auto& g = slice.grid();
  const double h = g.spacing();
  const int m = slice.dim();
  if (!(t0 >= 2.0 * c * (1.0 - 1e-12)))
    throw InputError("extract_profile: slice time must be at least 2C so the strips separate");
  const double cells = c / h;
  if (std::abs(cells - std::round(cells)) > 1e-6)
    throw InputError("extract_profile: C must be a multiple of the slice spacing");
  if (g.x_min() > -t0 - c || g.x_max() < t0 + c) throw InputError("extract_profile: slice does not cover the strips");

  AsymptoticProfile p;
  p.half_width = c;
  p.m = m;
  p.source_time = t0;
  const auto ns = static_cast<std::size_t>(std::lround(2.0 * cells)) + 1;
  p.s_grid = Grid1D::from_spacing(-c, h, ns);
  p.F.resize(ns * m);
  p.G.resize(ns * m);
  auto node = [&](double x) {
    const auto k = g.find(x, 1e-6);
    if (!k) throw InputError("extract_profile: strip sample is not on a slice node");
    return slice.at(*k);
  };
  for (std::size_t k = 0; k < ns; ++k) {
    const double s = p.s_grid.node(k);
    const auto f = node(s - t0);
    const auto gg = node(t0 - s);
    std::copy(f.begin(), f.end(), p.F.begin() + static_cast<long>(k * m));
    std::copy(gg.begin(), gg.end(), p.G.begin() + static_cast<long>(k * m));
  }

  const double inner = t0 - c - opts.interior_margin * c;
  p.alpha.assign(static_cast<std::size_t>(m), 0.0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (std::abs(g.node(i)) > inner + 1e-12 * c) continue;
    for (int q = 0; q < m; ++q) p.alpha[q] += slice.at(i)[q];
    ++count;
  }
  if (count == 0) throw InputError("extract_profile: empty interior");
  const double an = norm(p.alpha);
  for (auto& v : p.alpha) v /= an;

  const auto base = e1(m);
  double res = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.node(i);
    const double ax = std::abs(x);
    if (ax >= t0 + c - 1e-12 * c)
      res = std::max(res, distance(slice.at(i), base));
    else if (ax <= t0 - c + 1e-12 * c)
      res = std::max(res, distance(slice.at(i), p.alpha));
  }
  p.residual = res;
  const double tol = opts.tol_desc > 0.0 ? opts.tol_desc : 10.0 * h * h / (c * c);
  if (res > tol) {
    std::ostringstream os;
    os << "extract_profile: slice deviates from the travelling-wave form by " << res << " (tolerance " << tol
       << "); strips have not separated";
    throw NumericalError(os.str());
  }
  return p;
}

SphereSlice synthesize_slice(const AsymptoticProfile& p, double T, double dx, double pad) {
  const double c = p.half_width;
  if (!(T > c)) throw InputError("synthesize_slice: T must exceed C");
  if (dx <= 0.0) dx = p.s_grid.spacing();
  if (pad < 0.0) pad = 8.0 * dx;
  const Grid1D grid = symmetric_grid(dx, T + c + pad);
  SphereSlice out(grid, p.m, T);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    auto dst = out.at(i);
    if (x <= -T - c || x >= T + c) continue;
    if (x < -T + c) {
      const auto v = p.F_at(T + x);
      std::copy(v.begin(), v.end(), dst.begin());
    } else if (x <= T - c) {
      std::copy(p.alpha.begin(), p.alpha.end(), dst.begin());
    } else {
      const auto v = p.G_at(T - x);
      std::copy(v.begin(), v.end(), dst.begin());
    }
  }
  out.set_support({-T - c, T + c});
  return out;
}

ConsistencyReport consistency_check(const Evolution& ev, const AsymptoticProfile& p) {
  ConsistencyReport rep;
  const double c = p.half_width;
  for (std::size_t k = 0; k < ev.slices.size(); ++k) {
    const auto& s = ev.slices[k];
    const auto& vel = ev.velocities[k];
    const auto& g = s.grid();
    const double h = g.spacing();
    const double t = s.time();
    const int m = s.dim();
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
      const double x = g.node(i);
      double plus = 0.0, minus = 0.0;
      for (int q = 0; q < m; ++q) {
        const double px = (s.at(i + 1)[q] - s.at(i - 1)[q]) / (2.0 * h);
        const double pt = vel[i * m + q];
        plus += (px + pt) * (px + pt);
        minus += (px - pt) * (px - pt);
      }
      if (std::abs(t + x) >= c) rep.incoming_flatness = std::max(rep.incoming_flatness, std::sqrt(plus));
      if (std::abs(t - x) >= c) rep.outgoing_flatness = std::max(rep.outgoing_flatness, std::sqrt(minus));
      if (t > std::abs(x) + c) rep.interior_deviation = std::max(rep.interior_deviation, distance(s.at(i), p.alpha));
    }
  }
  return rep;
}

}  // namespace wavemap
