#pragma once

// Characteristic integration of phi_uv = -phi (phi_u . phi_v) from
// time-symmetric data phi(0) = f, phi_t(0) = 0.
//
// Primary scheme: (t, x) leapfrog at unit CFL (dt = dx = h). In null
// coordinates the stencil is the diamond N = (t+h, x), S = (t-h, x),
// E = (t, x+h), W = (t, x-h) around the centre C0 = (t, x):
//
//   N = E + W - S + C0 (|E - W|^2 - |N - S|^2) / 4,
//
// i.e. phi_tt - phi_xx = phi (|phi_x|^2 - |phi_t|^2) with centred
// differences. The update is implicit in N through phi_t; it is solved per
// node by fixed-point iteration and then projected radially onto the sphere.
// The linear part is exact at unit CFL.
//
// Cross-check scheme: marching on the null lattice with spacing delta = h
// (time levels delta / 2 apart, nodes staggered by delta / 2), with the
// nonlinearity evaluated at the cell centre from corner averages.

#include "wavemap/core.hpp"
#include "wavemap/data.hpp"

#include <optional>
#include <vector>

namespace wavemap {

enum class Scheme { leapfrog, null_lattice };

struct EvolveOptions {
  double h_step = 1.0 / 256.0;
  /// Final time; a negative value evolves backwards.
  double t_final = 1.0;
  /// Times at which slices are stored; must be multiples of h_step with the
  /// sign of t_final. t_final itself is always stored.
  std::vector<double> slice_times;
  Scheme scheme = Scheme::leapfrog;
  /// Abort if | |phi| - 1 | exceeds this before projection.
  double blowup_guard = 0.1;
  /// Extra nodes beyond the light cone of the support.
  int margin_nodes = 8;
};

/// Discrete Pohlmeyer monitors: variation of |phi_u|^2 along v and of
/// |phi_v|^2 along u per unit null length, and max |phi . phi_u|, |phi . phi_v|.
struct PohlmeyerLog {
  double u_variation = 0.0;
  double v_variation = 0.0;
  double orthogonality = 0.0;
};

struct Evolution {
  std::optional<DataSpec> spec;
  double h_step = 0.0;
  Scheme scheme = Scheme::leapfrog;
  /// Stored slices in increasing |t|.
  std::vector<SphereSlice> slices;
  /// phi_t at each stored slice (centred differences), node-major.
  std::vector<std::vector<double>> velocities;
  /// Diamond-level monitor accumulated over every update.
  PohlmeyerLog monitors;
  /// max | |phi| - 1 | over all nodes after projection.
  double max_sphere_defect = 0.0;
  /// max | |phi| - 1 | over all nodes before projection.
  double max_unprojected_defect = 0.0;

  const SphereSlice& slice_at(double t) const;
  const std::vector<double>& velocity_at(double t) const;
};

/// Evolves resummed data built from spec on a grid covering the light cone.
Evolution evolve(const DataSpec& spec, const EvolveOptions& opts);

/// Evolves an arbitrary time-symmetric initial slice. The slice grid spacing
/// must equal h_step and the grid must contain the light cone of its support
/// up to |t_final| plus the margin.
Evolution evolve_from(const SphereSlice& initial, const EvolveOptions& opts);

/// Exact circle-target solution phi = (cos Theta, sin Theta),
/// Theta(t, x) = (theta(x + t) + theta(x - t)) / 2.
SphereSlice circle_exact(const ScalarFunction& theta, const Grid1D& grid, double t);

/// Pohlmeyer residual from consecutive stored slices: |phi_u|^2 is compared
/// along lines of constant u, |phi_v|^2 along lines of constant v.
/// Requires at least two slices.
PohlmeyerLog pohlmeyer_residual(const Evolution& ev);

}  // namespace wavemap
