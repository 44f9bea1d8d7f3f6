#pragma once

// Asymptotic structure of a wave map for t > C: the slice is e1 outside
// |x| <= t + C, a constant alpha on |x| <= t - C, and travelling waves
// F(t + x), G(t - x) in the two strips of width 2C.

#include "wavemap/core.hpp"
#include "wavemap/evolve.hpp"

#include <vector>

namespace wavemap {

struct AsymptoticProfile {
  double half_width = 1.0;  // C
  int m = 3;
  /// Sample grid on [-C, C] shared by F and G.
  Grid1D s_grid = Grid1D(-1.0, 1.0, 2);
  std::vector<double> F;  // node-major m-vectors
  std::vector<double> G;
  std::vector<double> alpha;
  /// max deviation of the source slice from the five-piece description
  double residual = 0.0;
  /// time of the slice the profile was extracted from
  double source_time = 0.0;

  std::vector<double> F_at(double s) const;
  std::vector<double> G_at(double s) const;
};

struct ExtractOptions {
  /// Inset of the interior average from the strip edges, in units of C.
  double interior_margin = 0.5;
  /// Residual tolerance; <= 0 selects 10 h^2 / C^2.
  double tol_desc = 0.0;
};

/// Reads F, G and alpha off a slice at T0 >= 2C; throws NumericalError if the
/// slice deviates from the five-piece form by more than tol_desc.
AsymptoticProfile extract_profile(const SphereSlice& slice, double half_width, const ExtractOptions& opts = {});

/// Evaluates the five-piece description at time T on the grid
/// {k dx : |x| <= T + C + pad}. dx defaults to the profile spacing; off-node
/// strip samples use cubic interpolation followed by projection.
SphereSlice synthesize_slice(const AsymptoticProfile& p, double T, double dx = 0.0, double pad = -1.0);

struct ConsistencyReport {
  /// max |(d_x + d_t) phi| over stored nodes with |t + x| >= C
  double incoming_flatness = 0.0;
  /// max |(d_x - d_t) phi| over stored nodes with |t - x| >= C
  double outgoing_flatness = 0.0;
  /// max |phi - alpha| over stored nodes with t > |x| + C
  double interior_deviation = 0.0;
};

ConsistencyReport consistency_check(const Evolution& ev, const AsymptoticProfile& p);

}  // namespace wavemap
