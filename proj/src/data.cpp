#include "wavemap/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace wavemap {

void DataSpec::validate() const {
  if (!(half_width > 0.0)) throw InputError("DataSpec: C must be positive");
  if (!(eps >= -eps_max && eps <= eps_max)) {
    std::ostringstream os;
    os << "DataSpec: |eps| = " << std::abs(eps) << " exceeds eps_max = " << eps_max;
    throw InputError(os.str());
  }
  if (m < 2) throw InputError("DataSpec: m must be >= 2");
  if (bump.target_dim() != m - 1) {
    std::ostringstream os;
    os << "DataSpec: bump has " << bump.target_dim() << " components but m - 1 = " << m - 1;
    throw InputError(os.str());
  }
  if (bump.half_width != half_width) throw InputError("DataSpec: bump half width differs from C");
  if (m > 2) {
    int nonzero = 0;
    for (const auto& c : bump.components) {
      double mx = 0.0;
      for (int k = -64; k <= 64; ++k) mx = std::max(mx, std::abs(c(half_width * k / 64.5)));
      nonzero += mx > 0.0 ? 1 : 0;
    }
    if (nonzero < 2) throw InputError("DataSpec: m > 2 requires at least two nonzero bump components");
  }
  if (truncation && *truncation < 0) throw InputError("DataSpec: truncation order must be >= 0");
}

double cubic_moment(const ScalarBump& h3) {
  const double c = h3.half_width();
  return quad([&](double x) { return std::pow(h3.derivative(x, 1), 3); }, -c, c, 512);
}

BumpProfile make_bump_pair(const ScalarBump& h3, std::string id) {
  const double c = h3.half_width();
  const double moment = cubic_moment(h3);
  const double scale = quad([&](double x) { return std::pow(std::abs(h3.derivative(x, 1)), 3); }, -c, c, 512);
  if (!(std::abs(moment) >= 1e-6 * scale)) {
    std::ostringstream os;
    os << "make_bump_pair: int (h3')^3 = " << moment << " is negligible against int |h3'|^3 = " << scale
       << "; choose an asymmetric shape";
    throw InputError(os.str());
  }
  BumpProfile p;
  p.half_width = c;
  p.components = {h3.differentiated(), h3};
  p.id = std::move(id);
  return p;
}

BumpProfile make_bump_pair(double half_width) {
  return make_bump_pair(ScalarBump::asymmetric(half_width), "mollifier-asym");
}

BumpProfile make_circle_profile(double half_width) {
  BumpProfile p;
  p.half_width = half_width;
  p.components = {ScalarBump::asymmetric(half_width).scaled(4.0)};
  p.id = "circle-mollifier-asym";
  return p;
}

DataSpec default_spec(double half_width, double eps, int m) {
  DataSpec s;
  s.half_width = half_width;
  s.eps = eps;
  s.m = m;
  if (m == 2) {
    s.bump = make_circle_profile(half_width);
  } else if (m == 3) {
    s.bump = make_bump_pair(half_width);
  } else {
    s.bump = make_bump_pair(half_width);
    for (int k = 3; k < m; ++k) s.bump.components.push_back(ScalarBump::symmetric(half_width).scaled(0.0));
  }
  return s;
}

namespace {

// sin(eps r) / r and its r-derivative divided by r, with series near r = 0.
double sinc_eps(double eps, double r) {
  const double z = eps * r;
  if (std::abs(z) < 1e-4) return eps * (1.0 - z * z / 6.0 + z * z * z * z / 120.0);
  return std::sin(z) / r;
}

// (d/dr [sin(eps r)/r]) / r
double sinc_eps_prime_over_r(double eps, double r) {
  const double z = eps * r;
  const double e3 = eps * eps * eps;
  if (std::abs(z) < 1e-3) return e3 * (-1.0 / 3.0 + z * z / 30.0 - z * z * z * z / 840.0);
  return (z * std::cos(z) - std::sin(z)) / (r * r * r);
}

}  // namespace

std::vector<double> initial_value(const DataSpec& spec, double x) {
  const auto h = spec.bump.value(x);
  const double r2 = std::inner_product(h.begin(), h.end(), h.begin(), 0.0);
  const double r = std::sqrt(r2);
  std::vector<double> f(static_cast<std::size_t>(spec.m), 0.0);
  if (!spec.truncation) {
    f[0] = std::cos(spec.eps * r);
    const double s = sinc_eps(spec.eps, r);
    for (std::size_t k = 0; k < h.size(); ++k) f[k + 1] = s * h[k];
    return f;
  }
  // partial sum: even n contributes (-1)^{n/2} |h|^n e1, odd n contributes
  // (-1)^{(n-1)/2} |h|^{n-1} h
  double term = 1.0;  // eps^n / n! * |h|^n with sign tracked separately
  double along_e1 = 0.0;
  double along_h = 0.0;  // coefficient of h
  for (int n = 0; n <= *spec.truncation; ++n) {
    if (n > 0) term *= spec.eps / n;
    const double sign = ((n / 2) % 2 == 0) ? 1.0 : -1.0;
    if (n % 2 == 0)
      along_e1 += sign * term * std::pow(r2, n / 2);
    else
      along_h += sign * term * std::pow(r2, (n - 1) / 2);
  }
  f[0] = along_e1;
  for (std::size_t k = 0; k < h.size(); ++k) f[k + 1] = along_h * h[k];
  return f;
}

std::vector<double> initial_derivative(const DataSpec& spec, double x) {
  if (spec.truncation) throw InputError("initial_derivative: only defined for resummed data");
  const auto h = spec.bump.value(x);
  const auto hp = spec.bump.derivative(x, 1);
  double r2 = 0.0, hhp = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    r2 += h[k] * h[k];
    hhp += h[k] * hp[k];
  }
  const double r = std::sqrt(r2);
  std::vector<double> d(static_cast<std::size_t>(spec.m), 0.0);
  // d/dx cos(eps r) = -eps sin(eps r) r' = -eps (sin(eps r)/r) (h.h')
  const double s = sinc_eps(spec.eps, r);
  d[0] = -spec.eps * s * hhp;
  const double sp = sinc_eps_prime_over_r(spec.eps, r) * hhp;
  for (std::size_t k = 0; k < h.size(); ++k) d[k + 1] = sp * h[k] + s * hp[k];
  return d;
}

Grid1D symmetric_grid(double spacing, double extent) {
  const auto half = static_cast<std::size_t>(std::ceil(extent / spacing - 1e-9));
  return Grid1D::centered(spacing, half);
}

SphereSlice build_initial_data(const DataSpec& spec, const Grid1D& grid) {
  spec.validate();
  SphereSlice slice(grid, spec.m, 0.0);
  const double c = spec.half_width;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    if (std::abs(x) >= c) continue;  // exactly e1
    const auto f = initial_value(spec, x);
    std::copy(f.begin(), f.end(), slice.at(i).begin());
  }
  slice.set_support({-c, c});
  return slice;
}

SmallnessReport smallness_check(const SphereSlice& f, const DataSpec& spec) {
  const double c = spec.half_width;
  const auto& g = f.grid();
  const int m = f.dim();
  SmallnessReport rep;
  auto dev = [&](std::size_t i) {
    const auto p = f.at(i);
    double s = (p[0] - 1.0) * (p[0] - 1.0);
    for (int k = 1; k < m; ++k) s += p[k] * p[k];
    return std::sqrt(s);
  };
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.node(i);
    const double d = dev(i);
    if (std::abs(x) > c * (1.0 + 1e-12))
      rep.support_leak = std::max(rep.support_leak, d);
    else
      rep.max_deviation = std::max(rep.max_deviation, d);
    if (i > 0 && i + 1 < g.size()) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) {
        const double dd = (f.at(i + 1)[k] - f.at(i - 1)[k]) / (2.0 * g.spacing());
        s += dd * dd;
      }
      rep.max_scaled_derivative = std::max(rep.max_scaled_derivative, c * std::sqrt(s));
    }
  }
  if (rep.support_leak > 0.0) {
    std::ostringstream os;
    os << "smallness_check: f - e1 is nonzero outside [-C, C] (max " << rep.support_leak << ")";
    throw NumericalError(os.str());
  }
  double h_inf = 0.0, hp_inf = 0.0;
  for (int k = -2048; k <= 2048; ++k) {
    const double x = c * k / 2048.0;
    h_inf = std::max(h_inf, norm(spec.bump.value(x)));
    hp_inf = std::max(hp_inf, norm(spec.bump.derivative(x, 1)));
  }
  rep.bound = 2.0 * std::abs(spec.eps) * std::max(h_inf, c * hp_inf);
  rep.ok = rep.max_deviation <= rep.bound && rep.max_scaled_derivative <= rep.bound;
  return rep;
}

}  // namespace wavemap
