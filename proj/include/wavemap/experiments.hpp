#pragma once

// Headline experiments: eps-scaling of alpha, log-T norm growth, scheme
// convergence on the circle target, and the multi-scale cascade.
// Independent jobs run concurrently; results are merged in input order.

#include "wavemap/core.hpp"
#include "wavemap/data.hpp"
#include "wavemap/evolve.hpp"
#include "wavemap/perturb.hpp"
#include "wavemap/profile.hpp"
#include "wavemap/spectral.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wavemap {

/// n log-spaced values in [lo, hi], each rounded to a multiple of `quantum`
/// (so synthesized strips land on profile nodes). Duplicates are removed.
std::vector<double> log_spaced(double lo, double hi, std::size_t n, double quantum = 0.0);

// ---------------------------------------------------------------------------
// Growth

struct GrowthOptions {
  double h_step = 0.0;         // <= 0: C / 256
  double t0_factor = 4.0;      // profile extracted at T0 = t0_factor * C
  std::vector<double> T_list;  // empty: 13 log-spaced values in [10C, 1e4 C]
  double synth_dx = 0.0;       // <= 0: C / 64
  double fit_min_factor = 10.0;
  LowerBoundWindow window;
  unsigned jobs = 0;  // 0: hardware concurrency
};

struct GrowthSample {
  double T = 0.0;
  double hdot_half = 0.0;
  double besov = 0.0;
  std::optional<double> lower_bound;
  std::vector<BesovBlock> blocks;
};

struct GrowthCurve {
  double half_width = 1.0;
  double T0 = 0.0;
  std::vector<double> alpha;
  double alpha_deviation = 0.0;  // |alpha - e1|
  double profile_residual = 0.0;
  std::vector<GrowthSample> samples;
  /// hdot_half^2 against ln T and besov against ln T, over T >= fit_min_factor * C
  LinearFit hdot_sq_fit;
  LinearFit besov_fit;
  /// lower bound against ln T where the window is non-empty (>= 2 points)
  std::optional<LinearFit> lower_bound_fit;
  /// asymptotic slopes from alpha alone: 2|a|^2 / pi, |a| / (pi sqrt2 ln 2),
  /// and |a|^2 / pi for the one-sided lower-bound window
  double predicted_hdot_sq_slope = 0.0;
  double predicted_besov_slope = 0.0;
  double predicted_lower_bound_slope = 0.0;
  /// max over samples of lower_bound - hdot_half^2 (should be <= 0)
  double lower_bound_excess = 0.0;
};

GrowthCurve growth_from_profile(const AsymptoticProfile& p, const GrowthOptions& opts);

/// Evolves to T0, extracts the profile and synthesizes every T in the list.
GrowthCurve run_growth(const DataSpec& spec, const GrowthOptions& opts);

// ---------------------------------------------------------------------------
// eps sweep

struct EpsSweepOptions {
  std::vector<double> eps_list = {0.05, 0.07, 0.1, 0.14, 0.2, 0.28, 0.4};
  /// coarse to fine; empty: {C / 1024, C / 2048}. Consecutive pairs are
  /// Richardson-combined assuming second order.
  std::vector<double> h_list;
  double t0_factor = 2.0;
  /// a point is flagged when |fine - coarse| exceeds this fraction of |fine|
  double richardson_tol = 0.05;
  unsigned jobs = 0;
};

struct EpsPoint {
  double eps = 0.0;
  /// alpha - e1 at each h (same order as h_list)
  std::vector<std::vector<double>> deviation;
  /// Richardson value from the two finest levels
  std::vector<double> extrapolated;
  double e2 = 0.0;         // extrapolated (alpha - e1) . e2
  double perp = 0.0;       // |alpha - e1| without the e2 component
  double richardson_change = 0.0;  // |fine - coarse| / |fine| on e2
  bool converged = true;
};

struct EpsSweepResult {
  double half_width = 1.0;
  std::vector<double> h_list;
  std::vector<EpsPoint> points;
  /// ln |e2| against ln eps over converged points
  LinearFit fit;
  double exponent = 0.0;
  double coefficient = 0.0;  // signed, exp(intercept) * sign(e2)
  /// coefficient refitted with the exponent frozen at 5
  double coefficient_p5 = 0.0;
  /// ln |perp| against ln eps
  LinearFit perp_fit;
  /// one exponent per consecutive h pair (Richardson), coarse pairs first
  std::vector<double> pair_exponents;
  Quadratures quadratures;
  double predicted = 0.0;             // kappa A E
  std::vector<double> predicted_c5;   // direct quadrature, full vector
  double relative_error = 0.0;        // |coefficient - predicted| / |predicted|
};

EpsSweepResult run_eps_sweep(const BumpProfile& pair, const EpsSweepOptions& opts);

// ---------------------------------------------------------------------------
// convergence

struct ConvergenceOptions {
  std::vector<double> h_list;  // empty: C/256, C/512, C/1024
  double t_final_factor = 2.0;
  unsigned jobs = 0;
};

struct ConvergenceLevel {
  double h = 0.0;
  double max_error = 0.0;
  PohlmeyerLog monitors;
  double sphere_defect = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceLevel> levels;
  /// log2(err(h) / err(h/2)) per consecutive pair
  std::vector<double> orders;
  std::vector<double> pohlmeyer_orders;  // from max(u, v) monitor variation
  double observed_order = 0.0;           // slope of ln err against ln h
  double pohlmeyer_order = 0.0;
};

/// spec must target the circle (m = 2); errors are taken against circle_exact.
ConvergenceResult run_convergence(const DataSpec& spec, const ConvergenceOptions& opts);

// ---------------------------------------------------------------------------
// cascade

struct CascadeOptions {
  int k_scales = 2;
  double eps = 0.4;
  double half_width = 1.0;
  double h_step = 0.0;  // <= 0: C / 512
  /// T list for the per-copy growth curves, in units of each copy's lambda C
  std::vector<double> growth_T = {10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 1000.0};
  unsigned jobs = 0;
};

struct CascadeCopy {
  double lambda = 1.0;
  double amplitude = 0.0;  // eps * lambda
  double center = 0.0;
  double data_hdot_half = 0.0;
  double data_besov = 0.0;
  /// |phi - single-copy reference| over the copy's window at the end time
  double independence_deviation = 0.0;
  /// max |phi(h) - phi(h/2)| of the single-copy reference at common nodes
  double scheme_error = 0.0;
  std::vector<double> alpha;
  double alpha_e2 = 0.0;
  double predicted_alpha_e2 = 0.0;  // kappa A E amplitude^5
  GrowthCurve growth;
};

struct CascadeResult {
  double t_end = 0.0;
  std::vector<CascadeCopy> copies;
  double data_besov = 0.0;  // whole cascade
  /// |hdot(f(x / 2)) / hdot(f) - 1| at the largest copy's amplitude
  double scale_invariance_error = 0.0;
};

/// Throws InputError unless k_scales is 1, 2 or 3.
CascadeResult run_cascade(const CascadeOptions& opts);

// ---------------------------------------------------------------------------
// plots

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal SVG line plot; log axes take log10 of the data (non-positive
/// values are skipped).
std::string svg_line_plot(const std::vector<PlotSeries>& series, const std::string& title, const std::string& x_label,
                          const std::string& y_label, bool log_x, bool log_y);

}  // namespace wavemap
