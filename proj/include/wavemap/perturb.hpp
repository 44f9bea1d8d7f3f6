#pragma once

// Closed-form perturbation hierarchy phi = e1 + eps phi1 + eps^2 phi2 + eps^3 phi3 + ...
// for the series data, with h = (h_2, ..., h_m):
//
//   phi1(u,v) = (h(u) + h(v)) / 2
//   phi2(u,v) = -|h(u) + h(v)|^2 e1 / 8
//   phi3(u,v) = -(|h(u)|^2 h(u) + |h(v)|^2 h(v)) / 12 + (H(u) - H(v)) (h(u) - h(v)),
//   H'(u) = h(u) h'(u)^T / 8,  H(-C) = 0.
//
// alpha - e1 = (1/2) int int phi (phi_u . phi_v) du dv over [-C, C]^2, whose
// eps^5 part along e2 reduces to A E / 64 for h_2 = h_3'.

#include "wavemap/bump.hpp"
#include "wavemap/core.hpp"

#include <vector>

namespace wavemap {

/// alpha_2 - 0 = kAlphaKappa * A * E * eps^5 + O(eps^7). Calibrated against the
/// nonlinear evolution and a direct quadrature of the order-5 integrand.
inline constexpr double kAlphaKappa = 1.0 / 64.0;

class PerturbationSeries {
 public:
  explicit PerturbationSeries(BumpProfile bump, std::size_t h_cells = 2048);

  int m() const { return bump_.target_dim() + 1; }
  int k() const { return bump_.target_dim(); }
  double half_width() const { return bump_.half_width; }
  const BumpProfile& bump() const { return bump_; }

  std::vector<double> phi1(double u, double v) const;
  std::vector<double> phi2(double u, double v) const;
  std::vector<double> phi3(double u, double v) const;

  /// H(u), k x k row-major.
  std::vector<double> H(double u) const;
  const std::vector<double>& H_C() const { return h_end_; }

  /// phi^order sampled on the lattice [-C, C]^2 with `cells` cells per side.
  NullField sample(int order, std::size_t cells) const;

 private:
  BumpProfile bump_;
  Grid1D h_grid_;
  std::vector<std::vector<double>> h_table_;  // H at h_grid_ nodes
  std::vector<double> h_end_;
};

/// max over interior lattice nodes of |phi^i_uv - RHS_i| with centred
/// differences on a lattice of spacing C / cells. The parity-vanishing term
/// of the third-order equation is dropped.
double check_hierarchy(const PerturbationSeries& series, int order, std::size_t cells);

struct LemmaRecordResult {
  double residual = 0.0;          // max_u |(phi1.phi3)(u, C) - (phi1.phi3)(u, -C)|
  double reduced_residual = 0.0;  // max_u |h(u) . H(C) h(u)|
  double scale = 0.0;             // max_u |phi1 . phi3|(u, +-C) magnitude scale (|h|^4)
};

LemmaRecordResult check_lemma_record(const PerturbationSeries& series, std::size_t samples = 2049);

struct Quadratures {
  double A = 0.0;  // int h2 h3'
  double B = 0.0;  // int h3 h2'
  double D = 0.0;  // int h2 h2' h3
  double E = 0.0;  // int h2^2 h3'
  double scale_AB = 0.0;  // int |h2 h3'| + int |h3 h2'|
  double scale_DE = 0.0;  // int |h2 h2' h3| + int |h2^2 h3'|

  /// DA + EB + AD + EA + DB + AE with the measured values.
  double da_sum() const { return D * A + E * B + A * D + E * A + D * B + A * E; }
};

/// Throws NumericalError if |A| or |E| is too small for the pair to witness
/// the obstruction (below 1e-8 of its scale).
Quadratures quadratures_ABDE(const BumpProfile& pair, std::size_t panels = 2048);

/// Means over [-C, C] of the exact derivatives h2', h3', h2 h2', h3 h3',
/// h2^2 h2', h3^2 h3' (all should vanish), with a common magnitude scale.
struct MeanZeroCheck {
  std::vector<double> values;
  double scale = 0.0;
};
MeanZeroCheck mean_zero_eliminations(const BumpProfile& pair, std::size_t panels = 2048);

/// eps^5 coefficient of alpha - e1 from the reduced identity: kappa A E along e2.
std::vector<double> predicted_alpha_coefficient(const Quadratures& q, int m);

/// eps^5 coefficient of alpha - e1 by direct 2-D Gauss-Legendre quadrature of
/// (1/2) [phi1 (phi1_u.phi3_v + phi2_u.phi2_v + phi3_u.phi1_v) + phi3 (phi1_u.phi1_v)].
std::vector<double> quintic_coefficient_by_quadrature(const PerturbationSeries& series, std::size_t panels = 96);

struct ParityResidual {
  double odd_e1 = 0.0;      // max |e1 . (phi(eps) - phi(-eps)) / 2|
  double even_perp = 0.0;   // max |P_perp (phi(eps) + phi(-eps)) / 2 - P_perp e1|
  double phi1_error = 0.0;  // max |(phi(eps) - phi(-eps)) / (2 eps) - phi1|
};

/// Compares slices of evolutions at +eps and -eps (same grid and time) with
/// the parity structure and with phi1 = (h(x+t) + h(x-t)) / 2. The phi1
/// comparison is skipped at eps = 0.
ParityResidual parity_check(const SphereSlice& plus, const SphereSlice& minus, double eps, const BumpProfile& bump);

struct PerturbationReport {
  Quadratures quadratures;
  std::vector<double> H_C;
  double H_C_symmetric_part = 0.0;  // max |H(C) + H(C)^T|
  LemmaRecordResult lemma;
  MeanZeroCheck mean_zero;
  std::vector<double> hierarchy_residuals;  // orders 1..3 at C/512
  std::vector<double> predicted_c5;         // full vector, direct quadrature
  double predicted_c5_e2_closed_form = 0.0; // kappa A E
};

PerturbationReport perturbation_report(const BumpProfile& pair, std::size_t hierarchy_cells = 512);

}  // namespace wavemap
