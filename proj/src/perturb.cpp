#include "wavemap/perturb.hpp"

#include "wavemap/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace wavemap {

namespace {

using Vec = std::vector<double>;

double dotv(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// y = M x for k x k row-major M
Vec matvec(const Vec& mat, const Vec& x) {
  const std::size_t k = x.size();
  Vec y(k, 0.0);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b) y[a] += mat[a * k + b] * x[b];
  return y;
}

// Embeds an R^{m-1} vector (coefficient of e2..em) and an e1 coefficient into R^m.
Vec embed(double e1_part, const Vec& perp) {
  Vec out(perp.size() + 1);
  out[0] = e1_part;
  std::copy(perp.begin(), perp.end(), out.begin() + 1);
  return out;
}

}  // namespace

PerturbationSeries::PerturbationSeries(BumpProfile bump, std::size_t h_cells)
    : bump_(std::move(bump)), h_grid_(-bump_.half_width, bump_.half_width, h_cells + 1) {
  const auto k = static_cast<std::size_t>(bump_.target_dim());
  if (k < 1) throw InputError("PerturbationSeries: bump needs at least one component");
  const auto h_prime = [this, k](double u) {
    const auto h = bump_.value(u);
    const auto hp = bump_.derivative(u, 1);
    Vec out(k * k);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) out[a * k + b] = h[a] * hp[b] / 8.0;
    return out;
  };
  h_table_ = cumquad(h_prime, k * k, -bump_.half_width, h_grid_, 2);
  h_end_ = h_table_.back();
}

std::vector<double> PerturbationSeries::H(double u) const {
  const double c = bump_.half_width;
  const auto k = static_cast<std::size_t>(this->k());
  if (u <= -c) return Vec(k * k, 0.0);
  if (u >= c) return h_end_;
  const double r = (u + c) / h_grid_.spacing();
  const auto i = std::min(static_cast<std::size_t>(std::floor(r)), h_grid_.size() - 2);
  Vec out = h_table_[i];
  const double x0 = h_grid_.node(i);
  if (u > x0) {
    const auto add = quad(
        [&](double x) {
          const auto h = bump_.value(x);
          const auto hp = bump_.derivative(x, 1);
          Vec m(k * k);
          for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b) m[a * k + b] = h[a] * hp[b] / 8.0;
          return m;
        },
        k * k, x0, u, 2);
    for (std::size_t q = 0; q < out.size(); ++q) out[q] += add[q];
  }
  return out;
}

std::vector<double> PerturbationSeries::phi1(double u, double v) const {
  const auto hu = bump_.value(u);
  const auto hv = bump_.value(v);
  Vec p(hu.size());
  for (std::size_t a = 0; a < p.size(); ++a) p[a] = 0.5 * (hu[a] + hv[a]);
  return embed(0.0, p);
}

std::vector<double> PerturbationSeries::phi2(double u, double v) const {
  const auto hu = bump_.value(u);
  const auto hv = bump_.value(v);
  double s = 0.0;
  for (std::size_t a = 0; a < hu.size(); ++a) s += (hu[a] + hv[a]) * (hu[a] + hv[a]);
  return embed(-s / 8.0, Vec(hu.size(), 0.0));
}

std::vector<double> PerturbationSeries::phi3(double u, double v) const {
  const auto hu = bump_.value(u);
  const auto hv = bump_.value(v);
  const auto Hu = H(u);
  const auto Hv = H(v);
  const std::size_t k = hu.size();
  Vec dh(k), dH(k * k);
  for (std::size_t a = 0; a < k; ++a) dh[a] = hu[a] - hv[a];
  for (std::size_t q = 0; q < k * k; ++q) dH[q] = Hu[q] - Hv[q];
  const auto cross = matvec(dH, dh);
  const double ru = dotv(hu, hu);
  const double rv = dotv(hv, hv);
  Vec p(k);
  for (std::size_t a = 0; a < k; ++a) p[a] = -(ru * hu[a] + rv * hv[a]) / 12.0 + cross[a];
  return embed(0.0, p);
}

NullField PerturbationSeries::sample(int order, std::size_t cells) const {
  if (order < 1 || order > 3) throw InputError("PerturbationSeries::sample: order must be 1, 2 or 3");
  const double c = half_width();
  const Grid1D g(-c, c, cells + 1);
  const std::size_t n = g.size();
  const auto k = static_cast<std::size_t>(this->k());
  // per-node tables so the lattice costs O(n^2) arithmetic only
  std::vector<Vec> h(n), Hn(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = bump_.value(g.node(i));
    if (order == 3) Hn[i] = H(g.node(i));
  }
  NullField field(g, g, m(), true);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      auto out = field.at(i, j);
      if (order == 1) {
        for (std::size_t a = 0; a < k; ++a) out[a + 1] = 0.5 * (h[i][a] + h[j][a]);
      } else if (order == 2) {
        double s = 0.0;
        for (std::size_t a = 0; a < k; ++a) s += (h[i][a] + h[j][a]) * (h[i][a] + h[j][a]);
        out[0] = -s / 8.0;
      } else {
        const double ri = dotv(h[i], h[i]);
        const double rj = dotv(h[j], h[j]);
        for (std::size_t a = 0; a < k; ++a) {
          double cross = 0.0;
          for (std::size_t b = 0; b < k; ++b) cross += (Hn[i][a * k + b] - Hn[j][a * k + b]) * (h[i][b] - h[j][b]);
          out[a + 1] = -(ri * h[i][a] + rj * h[j][a]) / 12.0 + cross;
        }
      }
    }
  return field;
}

double check_hierarchy(const PerturbationSeries& series, int order, std::size_t cells) {
  const auto target = series.sample(order, cells);
  const auto first = order == 1 ? target : series.sample(1, cells);
  const double d = target.u_grid().spacing();
  const std::size_t n = target.u_grid().size();
  const int m = series.m();
  double worst = 0.0;
  std::vector<double> lhs(static_cast<std::size_t>(m)), pu(static_cast<std::size_t>(m)), pv(static_cast<std::size_t>(m));
  for (std::size_t i = 1; i + 1 < n; ++i)
    for (std::size_t j = 1; j + 1 < n; ++j) {
      for (int c = 0; c < m; ++c) {
        lhs[c] = (target.at(i + 1, j + 1)[c] - target.at(i + 1, j - 1)[c] - target.at(i - 1, j + 1)[c] +
                  target.at(i - 1, j - 1)[c]) /
                 (4.0 * d * d);
        pu[c] = (first.at(i + 1, j)[c] - first.at(i - 1, j)[c]) / (2.0 * d);
        pv[c] = (first.at(i, j + 1)[c] - first.at(i, j - 1)[c]) / (2.0 * d);
      }
      const double q = dot(pu, pv);
      double r = 0.0;
      for (int c = 0; c < m; ++c) {
        double rhs = 0.0;
        if (order == 2 && c == 0) rhs = -q;
        if (order == 3) rhs = -first.at(i, j)[c] * q;
        r = std::max(r, std::abs(lhs[c] - rhs));
      }
      worst = std::max(worst, r);
    }
  return worst;
}

LemmaRecordResult check_lemma_record(const PerturbationSeries& series, std::size_t samples) {
  const double c = series.half_width();
  const Grid1D g(-c, c, samples);
  const auto& hc = series.H_C();
  LemmaRecordResult res;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double u = g.node(i);
    const double top = dot(series.phi1(u, c), series.phi3(u, c));
    const double bottom = dot(series.phi1(u, -c), series.phi3(u, -c));
    res.residual = std::max(res.residual, std::abs(top - bottom));
    const auto h = series.bump().value(u);
    res.reduced_residual = std::max(res.reduced_residual, std::abs(dotv(h, matvec(hc, h))));
    const double r2 = dotv(h, h);
    res.scale = std::max(res.scale, r2 * r2);
  }
  return res;
}

Quadratures quadratures_ABDE(const BumpProfile& pair, std::size_t panels) {
  if (pair.target_dim() < 2) throw InputError("quadratures_ABDE: need components (h2, h3)");
  const auto& h2 = pair.components[0];
  const auto& h3 = pair.components[1];
  const double c = pair.half_width;
  Quadratures q;
  q.A = quad([&](double x) { return h2(x) * h3.derivative(x, 1); }, -c, c, panels);
  q.B = quad([&](double x) { return h3(x) * h2.derivative(x, 1); }, -c, c, panels);
  q.D = quad([&](double x) { return h2(x) * h2.derivative(x, 1) * h3(x); }, -c, c, panels);
  q.E = quad([&](double x) { return h2(x) * h2(x) * h3.derivative(x, 1); }, -c, c, panels);
  q.scale_AB = quad([&](double x) { return std::abs(h2(x) * h3.derivative(x, 1)); }, -c, c, panels) +
               quad([&](double x) { return std::abs(h3(x) * h2.derivative(x, 1)); }, -c, c, panels);
  q.scale_DE = quad([&](double x) { return std::abs(h2(x) * h2.derivative(x, 1) * h3(x)); }, -c, c, panels) +
               quad([&](double x) { return std::abs(h2(x) * h2(x) * h3.derivative(x, 1)); }, -c, c, panels);
  if (!(std::abs(q.A) > 1e-8 * q.scale_AB) || !(std::abs(q.E) > 1e-8 * q.scale_DE)) {
    std::ostringstream os;
    os << "quadratures_ABDE: A = " << q.A << ", E = " << q.E << "; the pair cannot witness alpha != e1";
    throw NumericalError(os.str());
  }
  return q;
}

MeanZeroCheck mean_zero_eliminations(const BumpProfile& pair, std::size_t panels) {
  if (pair.target_dim() < 2) throw InputError("mean_zero_eliminations: need components (h2, h3)");
  const auto& h2 = pair.components[0];
  const auto& h3 = pair.components[1];
  const double c = pair.half_width;
  const std::array<ScalarFunction, 6> fs = {
      [&](double x) { return h2.derivative(x, 1); },
      [&](double x) { return h3.derivative(x, 1); },
      [&](double x) { return h2(x) * h2.derivative(x, 1); },
      [&](double x) { return h3(x) * h3.derivative(x, 1); },
      [&](double x) { return h2(x) * h2(x) * h2.derivative(x, 1); },
      [&](double x) { return h3(x) * h3(x) * h3.derivative(x, 1); },
  };
  MeanZeroCheck out;
  for (const auto& f : fs) {
    out.values.push_back(quad(f, -c, c, panels));
    out.scale = std::max(out.scale, quad([&](double x) { return std::abs(f(x)); }, -c, c, panels));
  }
  return out;
}

std::vector<double> predicted_alpha_coefficient(const Quadratures& q, int m) {
  if (m < 3) throw InputError("predicted_alpha_coefficient: requires m >= 3");
  Vec c5(static_cast<std::size_t>(m), 0.0);
  c5[1] = kAlphaKappa * q.A * q.E;
  return c5;
}

std::vector<double> quintic_coefficient_by_quadrature(const PerturbationSeries& series, std::size_t panels) {
  static constexpr std::array<double, 5> gx = {-0.906179845938663992797626878299, -0.538469310105683091036314420700,
                                               0.0, 0.538469310105683091036314420700,
                                               0.906179845938663992797626878299};
  static constexpr std::array<double, 5> gw = {0.236926885056189087514264040720, 0.478628670499366468041291514836,
                                               0.568888888888888888888888888889, 0.478628670499366468041291514836,
                                               0.236926885056189087514264040720};
  const double c = series.half_width();
  const auto k = static_cast<std::size_t>(series.k());
  const double width = 2.0 * c / static_cast<double>(panels);

  // tabulate everything at the tensor-product nodes
  struct Node {
    double x, w;
    Vec h, hp, g, gp, H, Hp;  // g = |h|^2 h, Hp = H'
  };
  std::vector<Node> nodes;
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = -c + (static_cast<double>(p) + 0.5) * width;
    for (std::size_t q = 0; q < gx.size(); ++q) {
      Node nd;
      nd.x = mid + 0.5 * width * gx[q];
      nd.w = 0.5 * width * gw[q];
      nd.h = series.bump().value(nd.x);
      nd.hp = series.bump().derivative(nd.x, 1);
      const double r2 = dotv(nd.h, nd.h);
      const double hhp = dotv(nd.h, nd.hp);
      nd.g.resize(k);
      nd.gp.resize(k);
      for (std::size_t a = 0; a < k; ++a) {
        nd.g[a] = r2 * nd.h[a];
        nd.gp[a] = 2.0 * hhp * nd.h[a] + r2 * nd.hp[a];
      }
      nd.H = series.H(nd.x);
      nd.Hp.resize(k * k);
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) nd.Hp[a * k + b] = nd.h[a] * nd.hp[b] / 8.0;
      nodes.push_back(std::move(nd));
    }
  }

  Vec total(k, 0.0);
  Vec dh(k), dH(k * k), p1(k), p3(k), p3u(k), p3v(k), s(k);
  for (const auto& U : nodes)
    for (const auto& V : nodes) {
      for (std::size_t a = 0; a < k; ++a) {
        dh[a] = U.h[a] - V.h[a];
        p1[a] = 0.5 * (U.h[a] + V.h[a]);
        s[a] = U.h[a] + V.h[a];
      }
      for (std::size_t q = 0; q < k * k; ++q) dH[q] = U.H[q] - V.H[q];
      const auto dHdh = matvec(dH, dh);
      const auto dHhu = matvec(dH, U.hp);
      const auto dHhv = matvec(dH, V.hp);
      const auto Hpu = matvec(U.Hp, dh);
      const auto Hpv = matvec(V.Hp, dh);
      for (std::size_t a = 0; a < k; ++a) {
        p3[a] = -(U.g[a] + V.g[a]) / 12.0 + dHdh[a];
        p3u[a] = -U.gp[a] / 12.0 + Hpu[a] + dHhu[a];
        p3v[a] = -V.gp[a] / 12.0 - Hpv[a] - dHhv[a];
      }
      // phi1_u = h'(u)/2, phi1_v = h'(v)/2; phi2_u, phi2_v are e1-multiples
      const double p1u_p3v = 0.5 * dotv(U.hp, p3v);
      const double p3u_p1v = 0.5 * dotv(p3u, V.hp);
      const double p2u_p2v = (0.25 * dotv(s, U.hp)) * (0.25 * dotv(s, V.hp));
      const double p1u_p1v = 0.25 * dotv(U.hp, V.hp);
      const double w = U.w * V.w;
      for (std::size_t a = 0; a < k; ++a)
        total[a] += w * (p1[a] * (p1u_p3v + p2u_p2v + p3u_p1v) + p3[a] * p1u_p1v);
    }
  return embed(0.0, [&] {
    Vec half(k);
    for (std::size_t a = 0; a < k; ++a) half[a] = 0.5 * total[a];
    return half;
  }());
}

ParityResidual parity_check(const SphereSlice& plus, const SphereSlice& minus, double eps, const BumpProfile& bump) {
  if (plus.size() != minus.size() || plus.dim() != minus.dim() || plus.time() != minus.time())
    throw InputError("parity_check: slices must share grid and time");
  if (!(eps >= 0.0)) throw InputError("parity_check: eps must be non-negative");
  ParityResidual r;
  const int m = plus.dim();
  const double t = plus.time();
  for (std::size_t i = 0; i < plus.size(); ++i) {
    const auto a = plus.at(i);
    const auto b = minus.at(i);
    r.odd_e1 = std::max(r.odd_e1, std::abs(0.5 * (a[0] - b[0])));
    const double x = plus.grid().node(i);
    const auto hp = bump.value(x + t);
    const auto hm = bump.value(x - t);
    for (int c = 1; c < m; ++c) {
      r.even_perp = std::max(r.even_perp, std::abs(0.5 * (a[c] + b[c])));
      if (eps == 0.0) continue;
      const double odd = (a[c] - b[c]) / (2.0 * eps);
      const double phi1 = 0.5 * (hp[c - 1] + hm[c - 1]);
      r.phi1_error = std::max(r.phi1_error, std::abs(odd - phi1));
    }
  }
  return r;
}

PerturbationReport perturbation_report(const BumpProfile& pair, std::size_t hierarchy_cells) {
  PerturbationReport rep;
  const PerturbationSeries series(pair);
  rep.quadratures = quadratures_ABDE(pair);
  rep.H_C = series.H_C();
  const auto k = static_cast<std::size_t>(series.k());
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      rep.H_C_symmetric_part = std::max(rep.H_C_symmetric_part, std::abs(rep.H_C[a * k + b] + rep.H_C[b * k + a]));
  rep.lemma = check_lemma_record(series);
  rep.mean_zero = mean_zero_eliminations(pair);
  for (int order = 1; order <= 3; ++order) rep.hierarchy_residuals.push_back(check_hierarchy(series, order, hierarchy_cells));
  rep.predicted_c5 = quintic_coefficient_by_quadrature(series);
  rep.predicted_c5_e2_closed_form = kAlphaKappa * rep.quadratures.A * rep.quadratures.E;
  return rep;
}

}  // namespace wavemap
