#pragma once

// Shared domain types and numerical utilities for the wave-map laboratory.
//
// Conventions used throughout:
//   * m-vectors (points of R^m, the ambient space of S^{m-1}) are stored as
//     contiguous runs of doubles; fields are node-major, component-minor.
//   * e1 = (1, 0, ..., 0) is the base point of every data set.
//   * Fourier transforms use the kernel exp(-2 pi i x xi), xi in cycles per
//     unit length.

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavemap {

/// Bad parameters or malformed input (maps to CLI exit code 2).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed or a checked tolerance was violated
/// (maps to CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform 1-D grid. Node i sits at exactly x_min + i * spacing.
class Grid1D {
 public:
  Grid1D(double x_min, double x_max, std::size_t n);

  static Grid1D from_spacing(double x_min, double spacing, std::size_t n);

  /// Symmetric grid {k * spacing : |k| <= half_count}.
  static Grid1D centered(double spacing, std::size_t half_count);

  double x_min() const { return x_min_; }
  double x_max() const { return node(n_ - 1); }
  double spacing() const { return spacing_; }
  std::size_t size() const { return n_; }
  double node(std::size_t i) const { return x_min_ + static_cast<double>(i) * spacing_; }
  double length() const { return spacing_ * static_cast<double>(n_ - 1); }

  /// Index of the node at x, if x lies on a node to within rel_tol * spacing.
  std::optional<std::size_t> find(double x, double rel_tol = 1e-6) const;

 private:
  Grid1D() = default;
  double x_min_ = 0.0;
  double spacing_ = 1.0;
  std::size_t n_ = 2;
};

/// Closed interval outside of which a slice is identically e1.
struct SupportWindow {
  double lo = 0.0;
  double hi = 0.0;
};

/// S^{m-1}-valued samples on a spatial grid at a fixed time.
class SphereSlice {
 public:
  /// Slice filled with e1.
  SphereSlice(Grid1D grid, int m, double time);

  const Grid1D& grid() const { return grid_; }
  int dim() const { return m_; }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }
  std::size_t size() const { return grid_.size(); }

  std::span<double> at(std::size_t i) { return {values_.data() + i * m_, static_cast<std::size_t>(m_)}; }
  std::span<const double> at(std::size_t i) const {
    return {values_.data() + i * m_, static_cast<std::size_t>(m_)};
  }
  std::span<double> data() { return values_; }
  std::span<const double> data() const { return values_; }

  const SupportWindow& support() const { return support_; }
  void set_support(SupportWindow w) { support_ = w; }

  /// max_i | |phi_i| - 1 |
  double max_norm_defect() const;

  /// Throws NumericalError if the unit-norm invariant fails or a node outside
  /// the support window differs from e1.
  void validate(double tol_sphere = 1e-12) const;

 private:
  Grid1D grid_;
  int m_;
  double time_;
  std::vector<double> values_;
  SupportWindow support_;
};

/// Values of an m-vector field on a uniform (u, v) null lattice.
class NullField {
 public:
  NullField(Grid1D u_grid, Grid1D v_grid, int m, bool symmetric);

  const Grid1D& u_grid() const { return u_grid_; }
  const Grid1D& v_grid() const { return v_grid_; }
  int dim() const { return m_; }
  bool symmetric() const { return symmetric_; }

  std::span<double> at(std::size_t iu, std::size_t iv) {
    return {values_.data() + (iu * v_grid_.size() + iv) * m_, static_cast<std::size_t>(m_)};
  }
  std::span<const double> at(std::size_t iu, std::size_t iv) const {
    return {values_.data() + (iu * v_grid_.size() + iv) * m_, static_cast<std::size_t>(m_)};
  }

  /// max |value(u,v) - value(v,u)|; requires identical u and v grids.
  double symmetry_defect() const;

 private:
  Grid1D u_grid_;
  Grid1D v_grid_;
  int m_;
  bool symmetric_;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Small vector helpers.

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double distance(std::span<const double> a, std::span<const double> b);
std::vector<double> unit_vector(int m, int axis);

// ---------------------------------------------------------------------------
// Quadrature.

using ScalarFunction = std::function<double(double)>;
using VectorFunction = std::function<std::vector<double>(double)>;

/// Composite 5-point Gauss-Legendre rule on n equal panels of [a, b].
/// Throws NumericalError naming the abscissa if f returns a non-finite value.
double quad(const ScalarFunction& f, double a, double b, std::size_t n);

/// Vector-valued version of quad.
std::vector<double> quad(const VectorFunction& f, std::size_t dim, double a, double b, std::size_t n);

/// Running integral of f from a over the nodes of grid (value 0 at node 0).
/// Each grid interval is integrated with `panels_per_cell` Gauss-Legendre
/// panels, so the result is accurate to roundoff for smooth f.
/// Throws InputError unless grid.node(0) == a.
std::vector<std::vector<double>> cumquad(const VectorFunction& f, std::size_t dim, double a,
                                         const Grid1D& grid, std::size_t panels_per_cell = 1);

std::vector<double> cumquad(const ScalarFunction& f, double a, const Grid1D& grid,
                            std::size_t panels_per_cell = 1);

// ---------------------------------------------------------------------------
// Fourier transforms.

struct DftOptions {
  /// Padded length >= pad_factor * samples.
  double pad_factor = 4.0;
  /// Padded length (in samples) is also at least this many.
  std::size_t min_padded = 0;
  /// Maximal allowed |g(end) - g(start)| for the constant-at-infinity check.
  double tail_tol = 1e-10;
};

/// One-sided sampled |g^(xi)|^2 (summed over components) at xi_k = k * dxi,
/// k = 0 .. padded/2. For real g the two-sided density is even in xi.
struct SpectralDensity {
  double dxi = 0.0;
  std::size_t padded_size = 0;
  std::vector<double> density;

  double xi(std::size_t k) const { return dxi * static_cast<double>(k); }

  /// Two-sided Riemann sum  sum_k w(|xi_k|) |g^(xi_k)|^2 dxi  over all
  /// frequencies of the periodic DFT (DC and Nyquist counted once).
  double integrate(const std::function<double(double)>& weight, bool include_dc = true) const;
};

/// Spectral density of a sampled field that is constant near both ends of its
/// grid; the constant (value at the first node) is subtracted first.
/// `values` holds grid.size() * components doubles, node-major.
/// Throws InputError if the two end values disagree by more than tail_tol.
SpectralDensity dft_halfline_density(const Grid1D& grid, std::span<const double> values, int components,
                                     const DftOptions& opts = {});

/// Direct (non-FFT) transform g^(xi) = dx sum_j g_j exp(-2 pi i x_j xi) of a
/// compactly supported sampled field, evaluated at each xi. Result is
/// xi-major, component-minor.
std::vector<std::complex<double>> direct_transform(const Grid1D& grid, std::span<const double> values,
                                                   int components, std::span<const double> xis);

// ---------------------------------------------------------------------------
// Regression.

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  /// Standard error of the slope.
  double slope_stderr = 0.0;
};

/// Ordinary least squares y = intercept + slope * x. Requires >= 2 points.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace wavemap
