#pragma once

// Homogeneous Sobolev and Besov norms of slices (constant e1 subtracted).
//
// Normalization: with g^(xi) = int g(x) exp(-2 pi i x xi) dx,
//   |g|_{H^s}^2   = int |2 pi xi|^{2s} |g^(xi)|^2 dxi      (DC bin excluded)
//   |g|_{B^{s,1}} = sum_j 2^{js} ( int_{2^j <= |xi| < 2^{j+1}} |g^|^2 dxi )^{1/2}
// so s = 0 is Plancherel and |g|_{H^{1/2}} = |g'|_{H^{-1/2}} exactly.

#include "wavemap/bump.hpp"
#include "wavemap/core.hpp"
#include "wavemap/profile.hpp"

#include <optional>
#include <vector>

namespace wavemap {

struct BesovBlock {
  int j = 0;
  double value = 0.0;  // 2^{js} * (L^2 mass on the annulus)
};

struct BesovResult {
  double norm = 0.0;
  std::vector<BesovBlock> blocks;
};

/// Window [kappa_low / T, kappa_high / C] standing in for T^-1 << xi << 1.
struct LowerBoundWindow {
  double kappa_low = 10.0;
  double kappa_high = 0.1;
};

struct NormReport {
  double T = 0.0;
  double hdot_half = 0.0;
  double besov = 0.0;
  std::vector<BesovBlock> blocks;
  /// absent when the window is empty at this T
  std::optional<double> lower_bound;
};

/// Default transform options for norms: padding >= 5x, which gives
/// dxi <= 1 / (10 T) for slices spanning [-T - C, T + C].
DftOptions norm_dft_options();

/// Throws InputError if s is outside (-1, 1) or the slice is not e1 at both ends.
double sobolev_norm(const SphereSlice& slice, double s, const DftOptions& opts = norm_dft_options());

BesovResult besov_norm(const SphereSlice& slice, double s = 0.5, const DftOptions& opts = norm_dft_options());

/// Ḣ^{1/2} and Ḃ^{1/2,1}_2 from one transform, plus the lower bound when a
/// profile is supplied.
NormReport compute_norms(const SphereSlice& slice, const AsymptoticProfile* profile = nullptr,
                         const LowerBoundWindow& window = {}, const DftOptions& opts = norm_dft_options());

/// int_window |e^{2 pi i T xi} A(xi) - e^{-2 pi i T xi} B(-xi)|^2 / |2 pi xi| dxi
/// where A, B are the transforms of F', G'. The integrand is the squared
/// transform of the slice derivative at time T. Throws InputError if the
/// window is empty.
double lower_bound_integral(const AsymptoticProfile& p, double T, const LowerBoundWindow& window = {});

struct HeavisideReport {
  /// int (Dh)^2, the jump of w = D^{-1}((Dh)^2)
  double jump = 0.0;
  /// jump / (2 pi): the limit of every low block of |w|_{B^{1/2,1}_2}
  double predicted_block_value = 0.0;
  /// blocks from lowest_j upwards
  std::vector<BesovBlock> blocks;
  /// partial_sums[J - 1] = sum of the J lowest blocks
  std::vector<double> partial_sums;
  /// (xi, 2 pi |xi| |w^(xi)|) at xi = 2^j; tends to `jump` as xi -> 0
  std::vector<std::pair<double, double>> symbol_samples;
  /// slope of partial_sums against block count over the low blocks
  LinearFit partial_sum_fit;
  /// w sampled on [-C, C] (running integral of (Dh)^2)
  Grid1D w_grid = Grid1D(-1.0, 1.0, 2);
  std::vector<double> w;
};

/// Smoothed-Heaviside demonstration for w = D^{-1}(g Dh) with g = Dh.
/// Blocks j in [lowest_j, highest_j]; w^ is evaluated as
/// FT((Dh)^2)(xi) / (2 pi i xi) so the non-decaying tail never enters a DFT.
HeavisideReport heaviside_demo(const ScalarBump& h, int lowest_j = -14, int highest_j = 3, int fit_blocks = 8);

}  // namespace wavemap
