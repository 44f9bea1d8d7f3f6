#include "wavemap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

namespace wavemap {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SpectralDensity slice_density(const SphereSlice& slice, const DftOptions& opts) {
  const auto& g = slice.grid();
  const int m = slice.dim();
  for (std::size_t i : {std::size_t{0}, g.size() - 1}) {
    const auto p = slice.at(i);
    double d = std::abs(p[0] - 1.0);
    for (int c = 1; c < m; ++c) d = std::max(d, std::abs(p[c]));
    if (d > opts.tail_tol) {
      std::ostringstream os;
      os << "norms: slice is not e1 at the grid ends (deviation " << d << ")";
      throw InputError(os.str());
    }
  }
  return dft_halfline_density(g, slice.data(), m, opts);
}

BesovResult besov_from_density(const SpectralDensity& d, double s) {
  // bin k >= 1 belongs to block floor(log2 xi_k)
  BesovResult out;
  const std::size_t last = d.density.size() - 1;
  if (last < 1) return out;
  const int j_lo = static_cast<int>(std::floor(std::log2(d.xi(1))));
  const int j_hi = static_cast<int>(std::floor(std::log2(d.xi(last))));
  std::vector<double> mass(static_cast<std::size_t>(j_hi - j_lo + 1), 0.0);
  for (std::size_t k = 1; k <= last; ++k) {
    const int j = static_cast<int>(std::floor(std::log2(d.xi(k))));
    const double mult = (k == last) ? 1.0 : 2.0;
    mass[static_cast<std::size_t>(j - j_lo)] += mult * d.density[k] * d.dxi;
  }
  for (int j = j_lo; j <= j_hi; ++j) {
    const double v = std::pow(2.0, j * s) * std::sqrt(mass[static_cast<std::size_t>(j - j_lo)]);
    out.blocks.push_back({j, v});
    out.norm += v;
  }
  return out;
}

double sobolev_from_density(const SpectralDensity& d, double s) {
  return std::sqrt(d.integrate([s](double xi) { return std::pow(kTwoPi * xi, 2.0 * s); }, false));
}

// Fourth-order centred derivative of profile samples extended by e1 on the
// left and alpha on the right.
std::vector<double> profile_derivative(const AsymptoticProfile& p, const std::vector<double>& samples) {
  const auto& g = p.s_grid;
  const int m = p.m;
  const long n = static_cast<long>(g.size());
  auto at = [&](long i, int c) {
    if (i < 0) return c == 0 ? 1.0 : 0.0;
    if (i >= n) return p.alpha[c];
    return samples[static_cast<std::size_t>(i * m + c)];
  };
  std::vector<double> d(samples.size());
  const double h = g.spacing();
  for (long i = 0; i < n; ++i)
    for (int c = 0; c < m; ++c)
      d[static_cast<std::size_t>(i * m + c)] =
          (-at(i + 2, c) + 8.0 * at(i + 1, c) - 8.0 * at(i - 1, c) + at(i - 2, c)) / (12.0 * h);
  return d;
}

// Natural-ish cubic interpolation on a uniform grid via 4-point Lagrange.
template <class T>
T interp4(const std::vector<T>& y, double x0, double dx, double x) {
  const double r = (x - x0) / dx;
  long i0 = static_cast<long>(std::floor(r)) - 1;
  i0 = std::clamp<long>(i0, 0, static_cast<long>(y.size()) - 4);
  const double t = r - static_cast<double>(i0);
  const double w[4] = {-(t - 1) * (t - 2) * (t - 3) / 6.0, t * (t - 2) * (t - 3) / 2.0,
                       -t * (t - 1) * (t - 3) / 2.0, t * (t - 1) * (t - 2) / 6.0};
  T acc{};
  for (int q = 0; q < 4; ++q) acc += w[q] * y[static_cast<std::size_t>(i0 + q)];
  return acc;
}

}  // namespace

DftOptions norm_dft_options() {
  DftOptions o;
  o.pad_factor = 5.0;
  o.tail_tol = 1e-12;
  return o;
}

double sobolev_norm(const SphereSlice& slice, double s, const DftOptions& opts) {
  if (!(s > -1.0 && s < 1.0)) throw InputError("sobolev_norm: s must lie in (-1, 1)");
  return sobolev_from_density(slice_density(slice, opts), s);
}

BesovResult besov_norm(const SphereSlice& slice, double s, const DftOptions& opts) {
  return besov_from_density(slice_density(slice, opts), s);
}

NormReport compute_norms(const SphereSlice& slice, const AsymptoticProfile* profile, const LowerBoundWindow& window,
                         const DftOptions& opts) {
  const auto d = slice_density(slice, opts);
  NormReport r;
  r.T = slice.time();
  r.hdot_half = sobolev_from_density(d, 0.5);
  auto b = besov_from_density(d, 0.5);
  r.besov = b.norm;
  r.blocks = std::move(b.blocks);
  if (profile && r.T * window.kappa_high > window.kappa_low * profile->half_width)
    r.lower_bound = lower_bound_integral(*profile, r.T, window);
  return r;
}

double lower_bound_integral(const AsymptoticProfile& p, double T, const LowerBoundWindow& window) {
  const double c = p.half_width;
  const double lo = window.kappa_low / T;
  const double hi = window.kappa_high / c;
  if (!(hi > lo)) {
    std::ostringstream os;
    os << "lower_bound_integral: window [" << lo << ", " << hi << "] is empty at T = " << T;
    throw InputError(os.str());
  }
  const int m = p.m;
  const auto dF = profile_derivative(p, p.F);
  const auto dG = profile_derivative(p, p.G);

  // A(xi), B(-xi) are smooth on the scale 1/C: tabulate on a coarse grid over
  // [0, hi] and interpolate under the oscillatory factor exp(4 pi i T xi).
  const std::size_t n_coarse = 401;
  const double dc = hi / static_cast<double>(n_coarse - 4);
  std::vector<double> xis(n_coarse), neg(n_coarse);
  for (std::size_t k = 0; k < n_coarse; ++k) {
    xis[k] = dc * static_cast<double>(k);
    neg[k] = -xis[k];
  }
  const auto A = direct_transform(p.s_grid, dF, m, xis);
  const auto Bm = direct_transform(p.s_grid, dG, m, neg);
  std::vector<double> smooth(n_coarse);
  std::vector<std::complex<double>> cross(n_coarse);
  for (std::size_t k = 0; k < n_coarse; ++k) {
    double s = 0.0;
    std::complex<double> x{};
    for (int q = 0; q < m; ++q) {
      const auto a = A[k * m + q];
      const auto b = Bm[k * m + q];
      s += std::norm(a) + std::norm(b);
      x += a * std::conj(b);
    }
    smooth[k] = s;
    cross[k] = x;
  }

  // Composite Simpson with >= 64 points per oscillation period 1 / (2T).
  const double period = 1.0 / (2.0 * T);
  auto panels = static_cast<std::size_t>(std::ceil(64.0 * (hi - lo) / period));
  panels = std::max<std::size_t>(panels + (panels % 2), 256);
  const double step = (hi - lo) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t k = 0; k <= panels; ++k) {
    const double xi = lo + step * static_cast<double>(k);
    const double sm = interp4(smooth, 0.0, dc, xi);
    const auto cr = interp4(cross, 0.0, dc, xi);
    const double value = sm - 2.0 * std::real(std::polar(1.0, 2.0 * kTwoPi * T * xi) * cr);
    const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    total += w * value / (kTwoPi * xi);
  }
  return total * step / 3.0;
}

HeavisideReport heaviside_demo(const ScalarBump& h, int lowest_j, int highest_j, int fit_blocks) {
  if (highest_j < lowest_j) throw InputError("heaviside_demo: empty block range");
  const double c = h.half_width();
  const auto integrand = [&](double x) {
    const double d = h.derivative(x, 1);
    return d * d;
  };
  HeavisideReport rep;
  rep.jump = quad(integrand, -c, c, 1024);
  rep.predicted_block_value = rep.jump / kTwoPi;

  // w^(xi) = FT((Dh)^2)(xi) / (2 pi i xi); |w^|^2 = |FT|^2 / (2 pi xi)^2
  const auto w_hat_sq = [&](double xi) {
    const double re = quad([&](double x) { return integrand(x) * std::cos(kTwoPi * x * xi); }, -c, c, 256);
    const double im = quad([&](double x) { return integrand(x) * std::sin(kTwoPi * x * xi); }, -c, c, 256);
    return (re * re + im * im) / std::pow(kTwoPi * xi, 2);
  };

  double running = 0.0;
  for (int j = lowest_j; j <= highest_j; ++j) {
    const double a = std::ldexp(1.0, j);
    const double mass = 2.0 * quad(w_hat_sq, a, 2.0 * a, 16);  // both signs of xi
    const double v = std::sqrt(a) * std::sqrt(mass);
    rep.blocks.push_back({j, v});
    running += v;
    rep.partial_sums.push_back(running);
    rep.symbol_samples.emplace_back(a, kTwoPi * a * std::sqrt(w_hat_sq(a)));
  }
  const int nfit = std::min<int>(fit_blocks, static_cast<int>(rep.partial_sums.size()));
  if (nfit >= 2) {
    std::vector<double> x(static_cast<std::size_t>(nfit)), y(static_cast<std::size_t>(nfit));
    for (int k = 0; k < nfit; ++k) {
      x[k] = k + 1.0;
      y[k] = rep.partial_sums[static_cast<std::size_t>(k)];
    }
    rep.partial_sum_fit = fit_line(x, y);
  }

  rep.w_grid = Grid1D(-c, c, 513);
  rep.w = cumquad(integrand, -c, rep.w_grid, 2);
  return rep;
}

}  // namespace wavemap
