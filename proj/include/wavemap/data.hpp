#pragma once

// Counterexample initial data: f = sum_n eps^n / n! h^n, where h^n alternates
// between multiples of e1 (n even) and of h (n odd). The series resums to
//   f = cos(eps |h|) e1 + sin(eps |h|) h / |h|.

#include "wavemap/bump.hpp"
#include "wavemap/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wavemap {

struct DataSpec {
  double half_width = 1.0;  // C
  double eps = 0.3;
  int m = 3;
  BumpProfile bump;
  /// Partial-sum order N; closed-form resummation when empty.
  std::optional<int> truncation;
  double eps_max = 0.5;

  /// Throws InputError on inconsistent parameters.
  void validate() const;
};

/// Canonical pair (h2, h3) with h2 = h3'. `h3` defaults to the asymmetric
/// mollifier bump. Throws InputError if |int (h3')^3| < 1e-6 int |h3'|^3,
/// i.e. the pair cannot produce the quintic obstruction.
BumpProfile make_bump_pair(double half_width);
BumpProfile make_bump_pair(const ScalarBump& h3, std::string id);

/// Single-component profile theta for circle (m = 2) data f = (cos eps theta, sin eps theta).
BumpProfile make_circle_profile(double half_width);

/// int_{-C}^{C} (h3')^3, the quantity that must not vanish.
double cubic_moment(const ScalarBump& h3);

/// Data spec with the canonical bump pair (m = 3) or the circle profile (m = 2).
DataSpec default_spec(double half_width, double eps, int m);

/// f(x) as an m-vector (closed form or partial sum per spec.truncation).
std::vector<double> initial_value(const DataSpec& spec, double x);

/// d/dx f(x), closed form (resummed data only).
std::vector<double> initial_derivative(const DataSpec& spec, double x);

/// Samples f on `grid`; support window [-C, C].
SphereSlice build_initial_data(const DataSpec& spec, const Grid1D& grid);

/// Grid with the given spacing covering [-extent, extent], nodes at k * spacing.
Grid1D symmetric_grid(double spacing, double extent);

struct SmallnessReport {
  double max_deviation = 0.0;             // max |f - e1|
  double max_scaled_derivative = 0.0;     // C * max |d/dx (f - e1)|
  double bound = 0.0;                     // 2 eps * scale
  double support_leak = 0.0;              // max |f - e1| outside [-C, C]
  bool ok = false;
};

/// Measures the C^1 size of f - e1 on a slice (derivative by centred
/// differences) and checks it against 2 eps * max(|h|_inf, C |h'|_inf).
/// Throws NumericalError if f - e1 leaks outside [-C, C].
SmallnessReport smallness_check(const SphereSlice& f, const DataSpec& spec);

}  // namespace wavemap
