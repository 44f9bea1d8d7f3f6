#include "wavemap/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

namespace wavemap {

namespace {

unsigned resolve_jobs(unsigned jobs) {
  if (jobs > 0) return jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs f(0..n-1) in waves of at most `jobs` concurrent tasks; results keep
// index order whatever the completion order.
template <class F>
auto parallel_map(std::size_t n, unsigned jobs, F f) {
  using R = decltype(f(std::size_t{0}));
  std::vector<R> out;
  out.reserve(n);
  const std::size_t wave = resolve_jobs(jobs);
  for (std::size_t start = 0; start < n; start += wave) {
    std::vector<std::future<R>> futs;
    const std::size_t stop = std::min(n, start + wave);
    for (std::size_t i = start; i < stop; ++i) futs.push_back(std::async(std::launch::async, f, i));
    for (auto& fu : futs) out.push_back(fu.get());
  }
  return out;
}

std::vector<double> minus_e1(const std::vector<double>& v) {
  auto d = v;
  d[0] -= 1.0;
  return d;
}

double deviation_norm(const std::vector<double>& alpha) { return norm(minus_e1(alpha)); }

// Copy of `src` around x = shift, re-centred on a symmetric grid of the same
// spacing. shift must be a multiple of the spacing.
SphereSlice recentre(const SphereSlice& src, double shift, double extent) {
  const auto& g = src.grid();
  const double h = g.spacing();
  const Grid1D out_grid = symmetric_grid(h, extent);
  SphereSlice out(out_grid, src.dim(), src.time());
  for (std::size_t i = 0; i < out_grid.size(); ++i) {
    const auto k = g.find(out_grid.node(i) + shift, 1e-6);
    if (!k) throw InputError("recentre: window leaves the source grid or is off-node");
    const auto v = src.at(*k);
    std::copy(v.begin(), v.end(), out.at(i).begin());
  }
  out.set_support({out_grid.x_min(), out_grid.x_max()});
  return out;
}

}  // namespace

std::vector<double> log_spaced(double lo, double hi, std::size_t n, double quantum) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw InputError("log_spaced: need 0 < lo <= hi and n >= 1");
  std::vector<double> out;
  for (std::size_t k = 0; k < n; ++k) {
    const double f = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
    double v = lo * std::pow(hi / lo, f);
    if (quantum > 0.0) v = std::max(quantum, std::round(v / quantum) * quantum);
    out.push_back(v);
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------

GrowthCurve growth_from_profile(const AsymptoticProfile& p, const GrowthOptions& opts) {
  const double c = p.half_width;
  const double dx = opts.synth_dx > 0.0 ? opts.synth_dx : c / 64.0;
  const auto T_list = opts.T_list.empty() ? log_spaced(10.0 * c, 1e4 * c, 13, dx) : opts.T_list;

  GrowthCurve curve;
  curve.half_width = c;
  curve.T0 = p.source_time;
  curve.alpha = p.alpha;
  curve.alpha_deviation = deviation_norm(p.alpha);
  curve.profile_residual = p.residual;
  const double a2 = curve.alpha_deviation * curve.alpha_deviation;
  curve.predicted_hdot_sq_slope = 2.0 * a2 / std::numbers::pi;
  curve.predicted_besov_slope = curve.alpha_deviation / (std::numbers::pi * std::sqrt(2.0) * std::numbers::ln2);
  curve.predicted_lower_bound_slope = a2 / std::numbers::pi;

  curve.samples = parallel_map(T_list.size(), opts.jobs, [&](std::size_t k) {
    const auto slice = synthesize_slice(p, T_list[k], dx);
    const auto r = compute_norms(slice, &p, opts.window);
    GrowthSample s;
    s.T = T_list[k];
    s.hdot_half = r.hdot_half;
    s.besov = r.besov;
    s.lower_bound = r.lower_bound;
    s.blocks = r.blocks;
    return s;
  });

  std::vector<double> x, yh, yb, xl, yl;
  curve.lower_bound_excess = -std::numeric_limits<double>::infinity();
  for (const auto& s : curve.samples) {
    if (s.lower_bound) {
      curve.lower_bound_excess = std::max(curve.lower_bound_excess, *s.lower_bound - s.hdot_half * s.hdot_half);
      xl.push_back(std::log(s.T));
      yl.push_back(*s.lower_bound);
    }
    if (s.T < opts.fit_min_factor * c * (1.0 - 1e-12)) continue;
    x.push_back(std::log(s.T));
    yh.push_back(s.hdot_half * s.hdot_half);
    yb.push_back(s.besov);
  }
  if (x.size() < 2) throw InputError("growth: fewer than two T values above the fit threshold");
  curve.hdot_sq_fit = fit_line(x, yh);
  curve.besov_fit = fit_line(x, yb);
  if (xl.size() >= 2) curve.lower_bound_fit = fit_line(xl, yl);
  return curve;
}

GrowthCurve run_growth(const DataSpec& spec, const GrowthOptions& opts) {
  const double c = spec.half_width;
  EvolveOptions eo;
  eo.h_step = opts.h_step > 0.0 ? opts.h_step : c / 256.0;
  eo.t_final = opts.t0_factor * c;
  const auto ev = evolve(spec, eo);
  const auto p = extract_profile(ev.slices.back(), c);
  return growth_from_profile(p, opts);
}

// ---------------------------------------------------------------------------

EpsSweepResult run_eps_sweep(const BumpProfile& pair, const EpsSweepOptions& opts) {
  const double c = pair.half_width;
  EpsSweepResult res;
  res.half_width = c;
  res.h_list = opts.h_list.empty() ? std::vector<double>{c / 1024.0, c / 2048.0} : opts.h_list;
  if (res.h_list.size() < 2) throw InputError("sweep-eps: need at least two step sizes");
  for (std::size_t k = 1; k < res.h_list.size(); ++k)
    if (!(res.h_list[k] < res.h_list[k - 1])) throw InputError("sweep-eps: step sizes must decrease");
  if (opts.eps_list.size() < 3) throw InputError("sweep-eps: need at least three eps values");
  for (double e : opts.eps_list)
    if (!(e > 0.0 && e <= 0.5)) throw InputError("sweep-eps: eps values must lie in (0, 0.5]");

  const std::size_t nh = res.h_list.size();
  const std::size_t n_eps = opts.eps_list.size();
  const auto devs = parallel_map(n_eps * nh, opts.jobs, [&](std::size_t job) {
    const double eps = opts.eps_list[job / nh];
    const double h = res.h_list[job % nh];
    DataSpec spec;
    spec.half_width = c;
    spec.eps = eps;
    spec.m = pair.target_dim() + 1;
    spec.bump = pair;
    EvolveOptions eo;
    eo.h_step = h;
    eo.t_final = opts.t0_factor * c;
    const auto ev = evolve(spec, eo);
    return minus_e1(extract_profile(ev.slices.back(), c).alpha);
  });

  auto richardson = [&](const std::vector<double>& coarse, const std::vector<double>& fine, double ratio) {
    std::vector<double> out(fine.size());
    const double w = 1.0 / (ratio * ratio - 1.0);
    for (std::size_t q = 0; q < fine.size(); ++q) out[q] = fine[q] + w * (fine[q] - coarse[q]);
    return out;
  };
  auto fit_e2 = [&](const std::vector<std::vector<double>>& vals, const std::vector<bool>& use) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < vals.size(); ++i)
      if (use[i] && vals[i][1] != 0.0) {
        x.push_back(std::log(opts.eps_list[i]));
        y.push_back(std::log(std::abs(vals[i][1])));
      }
    if (x.size() < 2) throw NumericalError("sweep-eps: fewer than two usable eps values");
    return fit_line(x, y);
  };

  std::vector<bool> use(n_eps, true);
  std::vector<std::vector<double>> ext(n_eps);
  for (std::size_t i = 0; i < n_eps; ++i) {
    EpsPoint pt;
    pt.eps = opts.eps_list[i];
    for (std::size_t k = 0; k < nh; ++k) pt.deviation.push_back(devs[i * nh + k]);
    const auto& coarse = pt.deviation[nh - 2];
    const auto& fine = pt.deviation[nh - 1];
    pt.extrapolated = richardson(coarse, fine, res.h_list[nh - 2] / res.h_list[nh - 1]);
    pt.e2 = pt.extrapolated[1];
    double perp2 = 0.0;
    for (std::size_t q = 0; q < pt.extrapolated.size(); ++q)
      if (q != 1) perp2 += pt.extrapolated[q] * pt.extrapolated[q];
    pt.perp = std::sqrt(perp2);
    pt.richardson_change = std::abs(fine[1] - coarse[1]) / std::max(std::abs(fine[1]), 1e-300);
    pt.converged = std::isfinite(pt.e2) && pt.richardson_change <= opts.richardson_tol;
    use[i] = pt.converged;
    ext[i] = pt.extrapolated;
    res.points.push_back(std::move(pt));
  }

  res.fit = fit_e2(ext, use);
  res.exponent = res.fit.slope;
  double sign = 0.0;
  for (const auto& pt : res.points)
    if (pt.converged) sign += pt.e2 > 0.0 ? 1.0 : -1.0;
  sign = sign >= 0.0 ? 1.0 : -1.0;
  res.coefficient = sign * std::exp(res.fit.intercept);
  {
    double acc = 0.0;
    std::size_t n = 0;
    for (const auto& pt : res.points)
      if (pt.converged) {
        acc += std::log(std::abs(pt.e2)) - 5.0 * std::log(pt.eps);
        ++n;
      }
    res.coefficient_p5 = sign * std::exp(acc / static_cast<double>(n));
  }
  {
    std::vector<double> x, y;
    for (const auto& pt : res.points)
      if (pt.converged && pt.perp > 0.0) {
        x.push_back(std::log(pt.eps));
        y.push_back(std::log(pt.perp));
      }
    if (x.size() >= 2) res.perp_fit = fit_line(x, y);
  }
  for (std::size_t k = 0; k + 1 < nh; ++k) {
    std::vector<std::vector<double>> vals(n_eps);
    for (std::size_t i = 0; i < n_eps; ++i)
      vals[i] = richardson(res.points[i].deviation[k], res.points[i].deviation[k + 1], res.h_list[k] / res.h_list[k + 1]);
    res.pair_exponents.push_back(fit_e2(vals, use).slope);
  }

  res.quadratures = quadratures_ABDE(pair);
  res.predicted = kAlphaKappa * res.quadratures.A * res.quadratures.E;
  res.predicted_c5 = quintic_coefficient_by_quadrature(PerturbationSeries(pair));
  res.relative_error = std::abs(res.coefficient - res.predicted) / std::abs(res.predicted);
  return res;
}

// ---------------------------------------------------------------------------

ConvergenceResult run_convergence(const DataSpec& spec, const ConvergenceOptions& opts) {
  spec.validate();
  if (spec.m != 2) throw InputError("convergence: requires the circle target (m = 2)");
  const double c = spec.half_width;
  const auto h_list = opts.h_list.empty() ? std::vector<double>{c / 256.0, c / 512.0, c / 1024.0} : opts.h_list;
  if (h_list.size() < 2) throw InputError("convergence: need at least two step sizes");
  const double t_final = opts.t_final_factor * c;
  const auto& theta = spec.bump.components.at(0);
  const double eps = spec.eps;

  ConvergenceResult res;
  res.levels = parallel_map(h_list.size(), opts.jobs, [&](std::size_t k) {
    EvolveOptions eo;
    eo.h_step = h_list[k];
    eo.t_final = t_final;
    const auto ev = evolve(spec, eo);
    const auto& s = ev.slices.back();
    const auto exact = circle_exact([&](double x) { return eps * theta(x); }, s.grid(), t_final);
    ConvergenceLevel lv;
    lv.h = h_list[k];
    for (std::size_t i = 0; i < s.size(); ++i) lv.max_error = std::max(lv.max_error, distance(s.at(i), exact.at(i)));
    lv.monitors = ev.monitors;
    lv.sphere_defect = ev.max_sphere_defect;
    return lv;
  });

  std::vector<double> lh, le, lp;
  auto pmax = [](const PohlmeyerLog& l) { return std::max(l.u_variation, l.v_variation); };
  for (std::size_t k = 0; k < res.levels.size(); ++k) {
    const auto& lv = res.levels[k];
    lh.push_back(std::log(lv.h));
    le.push_back(std::log(std::max(lv.max_error, 1e-300)));
    lp.push_back(std::log(std::max(pmax(lv.monitors), 1e-300)));
    if (k > 0) {
      const auto& prev = res.levels[k - 1];
      const double r = std::log(prev.h / lv.h);
      res.orders.push_back(std::log(prev.max_error / lv.max_error) / r);
      res.pohlmeyer_orders.push_back(std::log(pmax(prev.monitors) / pmax(lv.monitors)) / r);
    }
  }
  res.observed_order = fit_line(lh, le).slope;
  res.pohlmeyer_order = fit_line(lh, lp).slope;
  return res;
}

// ---------------------------------------------------------------------------

CascadeResult run_cascade(const CascadeOptions& opts) {
  if (opts.k_scales < 1 || opts.k_scales > 3) throw InputError("cascade: k_scales must be 1, 2 or 3");
  if (!(opts.eps > 0.0 && opts.eps <= 0.5)) throw InputError("cascade: eps must lie in (0, 0.5]");
  const double c = opts.half_width;
  const double h = opts.h_step > 0.0 ? opts.h_step : c / 512.0;
  const auto k = static_cast<std::size_t>(opts.k_scales);
  const double smallest = std::ldexp(c, -(opts.k_scales - 1));
  if (std::abs(smallest / h - std::round(smallest / h)) > 1e-9 || smallest / h < 16.0)
    throw InputError("cascade: h_step must divide the smallest copy's half-width at least 16 times");

  CascadeResult res;
  res.t_end = 2.0 * c;  // strips of the largest copy have separated
  const double reach = res.t_end + 16.0 * h;

  // copy j: lambda = 2^-j, amplitude eps lambda, pair rescaled exactly
  std::vector<DataSpec> specs(k);
  std::vector<double> centers(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double lam = std::ldexp(1.0, -static_cast<int>(j));
    auto pair = make_bump_pair(lam * c);
    pair.components[0] = pair.components[0].scaled(lam);
    pair.id = "mollifier-asym-rescaled";
    specs[j] = DataSpec{lam * c, opts.eps * lam, 3, pair, std::nullopt, 0.5};
    if (j == 0) {
      centers[j] = 0.0;
    } else {
      const double want = centers[j - 1] + specs[j - 1].half_width + specs[j].half_width + 2.0 * reach + c;
      centers[j] = std::ceil(want / h) * h;
    }
  }
  for (std::size_t j = 1; j < k; ++j)
    if (centers[j] - specs[j].half_width - reach <= centers[j - 1] + specs[j - 1].half_width + reach)
      throw InputError("cascade: light cones of neighbouring copies overlap");

  // combined data on one grid
  const double extent = centers.back() + specs.back().half_width + reach + 16.0 * h;
  const Grid1D grid = symmetric_grid(h, extent);
  SphereSlice combined(grid, 3, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    for (std::size_t j = 0; j < k; ++j) {
      if (std::abs(x - centers[j]) >= specs[j].half_width) continue;
      const auto v = initial_value(specs[j], x - centers[j]);
      std::copy(v.begin(), v.end(), combined.at(i).begin());
    }
  }
  combined.set_support({-specs[0].half_width, centers.back() + specs.back().half_width});
  res.data_besov = besov_norm(combined).norm;

  EvolveOptions eo;
  eo.h_step = h;
  eo.t_final = res.t_end;
  eo.margin_nodes = 16;

  // job 0: combined run; jobs 1..k: reference at h; jobs k+1..2k: reference at h/2
  struct Run {
    std::optional<Evolution> ev;
  };
  const auto runs = parallel_map(2 * k + 1, opts.jobs, [&](std::size_t job) {
    Run r;
    if (job == 0) {
      r.ev = evolve_from(combined, eo);
    } else {
      const std::size_t j = (job - 1) % k;
      auto o = eo;
      if (job > k) o.h_step = h / 2.0;
      r.ev = evolve(specs[j], o);
    }
    return r;
  });
  const auto& joint = runs[0].ev->slices.back();

  {
    // same amplitude at lambda = 1 and 1/2: the critical norm must not move
    auto half = specs[0];
    half.half_width = 0.5 * c;
    half.bump = make_bump_pair(0.5 * c);
    half.bump.components[0] = half.bump.components[0].scaled(0.5);
    const auto g = symmetric_grid(h, c + 16.0 * h);
    const double a = sobolev_norm(build_initial_data(specs[0], g), 0.5);
    const double b = sobolev_norm(build_initial_data(half, g), 0.5);
    res.scale_invariance_error = std::abs(b / a - 1.0);
  }

  const auto copies = parallel_map(k, opts.jobs, [&](std::size_t j) {
    CascadeCopy cp;
    const auto& sp = specs[j];
    cp.lambda = sp.half_width / c;
    cp.amplitude = sp.eps;
    cp.center = centers[j];
    const auto& ref = runs[1 + j].ev->slices.back();
    const auto& ref2 = runs[1 + k + j].ev->slices.back();
    const auto data = build_initial_data(sp, symmetric_grid(h, sp.half_width + 16.0 * h));
    cp.data_hdot_half = sobolev_norm(data, 0.5);
    cp.data_besov = besov_norm(data).norm;

    const double window = sp.half_width + reach;
    const auto mine = recentre(joint, centers[j], window);
    const auto ref_win = recentre(ref, 0.0, window);
    for (std::size_t i = 0; i < mine.size(); ++i)
      cp.independence_deviation = std::max(cp.independence_deviation, distance(mine.at(i), ref_win.at(i)));
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const auto q = ref2.grid().find(ref.grid().node(i), 1e-6);
      if (q) cp.scheme_error = std::max(cp.scheme_error, distance(ref.at(i), ref2.at(*q)));
    }

    const auto p = extract_profile(mine, sp.half_width);
    cp.alpha = p.alpha;
    cp.alpha_e2 = p.alpha[1];
    const auto q = quadratures_ABDE(make_bump_pair(c));
    cp.predicted_alpha_e2 = kAlphaKappa * q.A * q.E * std::pow(cp.amplitude, 5);
    GrowthOptions go;
    for (double t : opts.growth_T) go.T_list.push_back(t * sp.half_width);
    go.synth_dx = sp.half_width / 64.0;
    go.jobs = 1;
    cp.growth = growth_from_profile(p, go);
    return cp;
  });
  res.copies = copies;
  return res;
}

// ---------------------------------------------------------------------------

std::string svg_line_plot(const std::vector<PlotSeries>& series, const std::string& title, const std::string& x_label,
                          const std::string& y_label, bool log_x, bool log_y) {
  constexpr double W = 640, H = 420, L = 80, R = 20, T = 40, B = 60;
  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
  auto ok = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0.0) && (!log_y || y > 0.0);
  };
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!ok(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!(x1 >= x0)) x0 = 0, x1 = 1;
  if (!(y1 >= y0)) y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + std::max(1e-300, std::abs(y0) * 1e-6 + 1e-300);
  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = x0 + (x1 - x0) * t / 4.0;
    const double fy = y0 + (y1 - y0) * t / 4.0;
    const double sx = L + (W - L - R) * t / 4.0;
    const double sy = H - B - (H - T - B) * t / 4.0;
    os << "<text x=\"" << sx << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
       << (log_x ? "1e" : "") << fx << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
       << (log_y ? "1e" : "") << fy << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\" font-size=\"13\">"
     << x_label << "</text>\n";
  os << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
     << (T + H - B) / 2 << ")\">" << y_label << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* col = colors[k % 5];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
      if (ok(s.x[i], s.y[i])) os << px(s.x[i]) << "," << py(s.y[i]) << " ";
    os << "\"/>\n";
    os << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (k + 1) << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
       << col << "\">" << s.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace wavemap
