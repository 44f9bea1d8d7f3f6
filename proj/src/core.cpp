#include "wavemap/core.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

namespace wavemap {

// ---------------------------------------------------------------------------
// Grid1D

Grid1D::Grid1D(double x_min, double x_max, std::size_t n) : x_min_(x_min), n_(n) {
  if (n < 2) throw InputError("Grid1D: need at least 2 nodes");
  if (!(x_max > x_min)) throw InputError("Grid1D: x_max must exceed x_min");
  spacing_ = (x_max - x_min) / static_cast<double>(n - 1);
}

Grid1D Grid1D::from_spacing(double x_min, double spacing, std::size_t n) {
  if (n < 2) throw InputError("Grid1D: need at least 2 nodes");
  if (!(spacing > 0.0)) throw InputError("Grid1D: spacing must be positive");
  Grid1D g;
  g.x_min_ = x_min;
  g.spacing_ = spacing;
  g.n_ = n;
  return g;
}

Grid1D Grid1D::centered(double spacing, std::size_t half_count) {
  return from_spacing(-static_cast<double>(half_count) * spacing, spacing, 2 * half_count + 1);
}

std::optional<std::size_t> Grid1D::find(double x, double rel_tol) const {
  const double r = (x - x_min_) / spacing_;
  const double k = std::round(r);
  if (std::abs(r - k) > rel_tol || k < 0.0 || k > static_cast<double>(n_ - 1)) return std::nullopt;
  return static_cast<std::size_t>(k);
}

// ---------------------------------------------------------------------------
// SphereSlice

SphereSlice::SphereSlice(Grid1D grid, int m, double time)
    : grid_(grid), m_(m), time_(time), values_(grid.size() * static_cast<std::size_t>(m), 0.0) {
  if (m < 2) throw InputError("SphereSlice: target dimension m must be >= 2");
  for (std::size_t i = 0; i < grid_.size(); ++i) values_[i * m_] = 1.0;
  support_ = {grid_.x_min(), grid_.x_max()};
}

double SphereSlice::max_norm_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < size(); ++i) worst = std::max(worst, std::abs(norm(at(i)) - 1.0));
  return worst;
}

void SphereSlice::validate(double tol_sphere) const {
  for (std::size_t i = 0; i < size(); ++i) {
    const auto p = at(i);
    const double d = std::abs(norm(p) - 1.0);
    if (!(d <= tol_sphere)) {
      std::ostringstream os;
      os << "SphereSlice: |phi| - 1 = " << d << " at x = " << grid_.node(i);
      throw NumericalError(os.str());
    }
    const double x = grid_.node(i);
    if (x < support_.lo || x > support_.hi) {
      bool is_e1 = p[0] == 1.0;
      for (int c = 1; c < m_; ++c) is_e1 = is_e1 && p[c] == 0.0;
      if (!is_e1) {
        std::ostringstream os;
        os << "SphereSlice: value differs from e1 outside support at x = " << x;
        throw NumericalError(os.str());
      }
    }
  }
}

// ---------------------------------------------------------------------------
// NullField

NullField::NullField(Grid1D u_grid, Grid1D v_grid, int m, bool symmetric)
    : u_grid_(u_grid),
      v_grid_(v_grid),
      m_(m),
      symmetric_(symmetric),
      values_(u_grid.size() * v_grid.size() * static_cast<std::size_t>(m), 0.0) {}

double NullField::symmetry_defect() const {
  if (u_grid_.size() != v_grid_.size() || u_grid_.x_min() != v_grid_.x_min() ||
      u_grid_.spacing() != v_grid_.spacing())
    throw InputError("NullField: symmetry requires identical u and v grids");
  double worst = 0.0;
  for (std::size_t i = 0; i < u_grid_.size(); ++i)
    for (std::size_t j = i + 1; j < v_grid_.size(); ++j) worst = std::max(worst, distance(at(i, j), at(j, i)));
  return worst;
}

// ---------------------------------------------------------------------------
// vector helpers

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::vector<double> unit_vector(int m, int axis) {
  std::vector<double> e(static_cast<std::size_t>(m), 0.0);
  e.at(static_cast<std::size_t>(axis)) = 1.0;
  return e;
}

// ---------------------------------------------------------------------------
// quadrature

namespace {

// 5-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 5> kGaussNodes = {
    -0.906179845938663992797626878299, -0.538469310105683091036314420700, 0.0,
    0.538469310105683091036314420700, 0.906179845938663992797626878299};
constexpr std::array<double, 5> kGaussWeights = {
    0.236926885056189087514264040720, 0.478628670499366468041291514836, 0.568888888888888888888888888889,
    0.478628670499366468041291514836, 0.236926885056189087514264040720};

void check_finite(double v, double x) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "quadrature: non-finite integrand value at x = " << x;
    throw NumericalError(os.str());
  }
}

}  // namespace

double quad(const ScalarFunction& f, double a, double b, std::size_t n) {
  if (n < 1) throw InputError("quad: need at least one panel");
  const double width = (b - a) / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double mid = a + (static_cast<double>(p) + 0.5) * width;
    double panel = 0.0;
    for (std::size_t k = 0; k < kGaussNodes.size(); ++k) {
      const double x = mid + 0.5 * width * kGaussNodes[k];
      const double v = f(x);
      check_finite(v, x);
      panel += kGaussWeights[k] * v;
    }
    total += 0.5 * width * panel;
  }
  return total;
}

std::vector<double> quad(const VectorFunction& f, std::size_t dim, double a, double b, std::size_t n) {
  if (n < 1) throw InputError("quad: need at least one panel");
  const double width = (b - a) / static_cast<double>(n);
  std::vector<double> total(dim, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    const double mid = a + (static_cast<double>(p) + 0.5) * width;
    for (std::size_t k = 0; k < kGaussNodes.size(); ++k) {
      const double x = mid + 0.5 * width * kGaussNodes[k];
      const auto v = f(x);
      if (v.size() != dim) throw InputError("quad: integrand returned wrong dimension");
      for (std::size_t c = 0; c < dim; ++c) {
        check_finite(v[c], x);
        total[c] += 0.5 * width * kGaussWeights[k] * v[c];
      }
    }
  }
  return total;
}

std::vector<std::vector<double>> cumquad(const VectorFunction& f, std::size_t dim, double a, const Grid1D& grid,
                                         std::size_t panels_per_cell) {
  if (std::abs(grid.node(0) - a) > 1e-12 * std::max(1.0, std::abs(a)))
    throw InputError("cumquad: grid must start at the lower integration limit");
  std::vector<std::vector<double>> out(grid.size(), std::vector<double>(dim, 0.0));
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const auto cell = quad(f, dim, grid.node(i - 1), grid.node(i), panels_per_cell);
    for (std::size_t c = 0; c < dim; ++c) out[i][c] = out[i - 1][c] + cell[c];
  }
  return out;
}

std::vector<double> cumquad(const ScalarFunction& f, double a, const Grid1D& grid, std::size_t panels_per_cell) {
  const auto v = cumquad([&](double x) { return std::vector<double>{f(x)}; }, 1, a, grid, panels_per_cell);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i][0];
  return out;
}

// ---------------------------------------------------------------------------
// Fourier transforms

namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

double SpectralDensity::integrate(const std::function<double(double)>& weight, bool include_dc) const {
  double total = 0.0;
  const std::size_t last = density.size() - 1;  // Nyquist bin
  for (std::size_t k = include_dc ? 0 : 1; k <= last; ++k) {
    const double mult = (k == 0 || k == last) ? 1.0 : 2.0;
    total += mult * weight(xi(k)) * density[k];
  }
  return total * dxi;
}

SpectralDensity dft_halfline_density(const Grid1D& grid, std::span<const double> values, int components,
                                     const DftOptions& opts) {
  const std::size_t n = grid.size();
  const auto m = static_cast<std::size_t>(components);
  if (values.size() != n * m) throw InputError("dft_halfline_density: value count does not match grid");

  double tail = 0.0;
  for (std::size_t c = 0; c < m; ++c) tail = std::max(tail, std::abs(values[(n - 1) * m + c] - values[c]));
  if (tail > opts.tail_tol) {
    std::ostringstream os;
    os << "dft_halfline_density: field does not decay to a common constant (tail mismatch " << tail << ")";
    throw InputError(os.str());
  }

  const auto want = std::max<std::size_t>(
      {static_cast<std::size_t>(std::ceil(opts.pad_factor * static_cast<double>(n))), opts.min_padded, n});
  const std::size_t padded = std::max<std::size_t>(next_pow2(want), 4);
  const double dx = grid.spacing();

  SpectralDensity out;
  out.padded_size = padded;
  out.dxi = 1.0 / (static_cast<double>(padded) * dx);
  out.density.assign(padded / 2 + 1, 0.0);

  double* in = fftw_alloc_real(padded);
  fftw_complex* spec = fftw_alloc_complex(padded / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(padded), in, spec, FFTW_ESTIMATE);
  }
  for (std::size_t c = 0; c < m; ++c) {
    const double base = values[c];
    for (std::size_t i = 0; i < n; ++i) in[i] = values[i * m + c] - base;
    std::fill(in + n, in + padded, 0.0);
    fftw_execute(plan);
    // The transform is taken relative to the first node; the phase factor
    // exp(-2 pi i x_0 xi) does not affect |g^|^2.
    for (std::size_t k = 0; k <= padded / 2; ++k) {
      const double re = spec[k][0] * dx;
      const double im = spec[k][1] * dx;
      out.density[k] += re * re + im * im;
    }
  }
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(spec);
  return out;
}

std::vector<std::complex<double>> direct_transform(const Grid1D& grid, std::span<const double> values,
                                                   int components, std::span<const double> xis) {
  const std::size_t n = grid.size();
  const auto m = static_cast<std::size_t>(components);
  if (values.size() != n * m) throw InputError("direct_transform: value count does not match grid");
  std::vector<std::complex<double>> out(xis.size() * m);
  const double dx = grid.spacing();
  for (std::size_t q = 0; q < xis.size(); ++q) {
    // Phase advances by a fixed rotation per node; re-anchor periodically to
    // keep the recurrence error at roundoff.
    const double w = -2.0 * std::numbers::pi * xis[q];
    const std::complex<double> step = std::polar(1.0, w * dx);
    std::complex<double> phase;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % 256 == 0) phase = std::polar(1.0, w * grid.node(i));
      for (std::size_t c = 0; c < m; ++c) out[q * m + c] += values[i * m + c] * phase;
      phase *= step;
    }
    for (std::size_t c = 0; c < m; ++c) out[q * m + c] *= dx;
  }
  return out;
}

// ---------------------------------------------------------------------------
// regression

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw InputError("fit_line: need >= 2 paired samples");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw InputError("fit_line: abscissae are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  fit.slope_stderr = n > 2 ? std::sqrt(sse / static_cast<double>(n - 2) / sxx) : 0.0;
  return fit;
}

}  // namespace wavemap
