#include "wavemap/evolve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace wavemap {

namespace {

constexpr int kMaxDim = 8;
constexpr int kMaxFixedPoint = 60;
using Point = std::array<double, kMaxDim>;

struct StepStats {
  double max_unprojected = 0.0;
  double max_projected = 0.0;
  PohlmeyerLog log;
};

[[noreturn]] void blowup(double t, double x, double defect) {
  std::ostringstream os;
  os << "evolve: blow-up guard tripped at t = " << t << ", x = " << x << " (| |phi| - 1 | = " << defect
     << " before projection)";
  throw NumericalError(os.str());
}

// Radially projects p onto the sphere; returns the defect before projection.
double project(double* p, int m) {
  double s = 0.0;
  for (int c = 0; c < m; ++c) s += p[c] * p[c];
  const double r = std::sqrt(s);
  for (int c = 0; c < m; ++c) p[c] /= r;
  return std::abs(r - 1.0);
}

double sq_dist(const double* a, const double* b, int m) {
  double s = 0.0;
  for (int c = 0; c < m; ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
  return s;
}

// Leapfrog diamond: N = E + W - S + C0 (|E - W|^2 - |N - S|^2) / 4.
void leapfrog_node(const double* e, const double* w, const double* s, const double* c0, double* n, int m) {
  Point b{};
  for (int c = 0; c < m; ++c) b[c] = e[c] + w[c] - s[c];
  const double ex = sq_dist(e, w, m);
  for (int c = 0; c < m; ++c) n[c] = b[c];
  for (int it = 0; it < kMaxFixedPoint; ++it) {
    const double lam = 0.25 * (ex - sq_dist(n, s, m));
    double change = 0.0;
    for (int c = 0; c < m; ++c) {
      const double v = b[c] + c0[c] * lam;
      change = std::max(change, std::abs(v - n[c]));
      n[c] = v;
    }
    if (change <= 1e-17) break;
  }
}

// First leapfrog step with S mirrored to N: N = (E + W)/2 + C0 |E - W|^2 / 8.
void leapfrog_start_node(const double* e, const double* w, const double* c0, double* n, int m) {
  const double k = sq_dist(e, w, m) / 8.0;
  for (int c = 0; c < m; ++c) n[c] = 0.5 * (e[c] + w[c]) + c0[c] * k;
}

// Null cell with corners p00 = (u, v), p01 = (u, v + d), p11 = (u + d, v + d)
// and unknown p10 = (u + d, v):
//   p10 = p00 + p11 - p01 + phi_c ((p10 - p00 + p11 - p01) . (p01 - p00 + p11 - p10)) / 4.
void null_node(const double* p00, const double* p01, const double* p11, double* p10, int m) {
  Point base{};
  for (int c = 0; c < m; ++c) base[c] = p00[c] + p11[c] - p01[c];
  for (int c = 0; c < m; ++c) p10[c] = base[c];
  for (int it = 0; it < kMaxFixedPoint; ++it) {
    double q = 0.0;
    for (int c = 0; c < m; ++c) q += (p10[c] - p00[c] + p11[c] - p01[c]) * (p01[c] - p00[c] + p11[c] - p10[c]);
    q *= 0.25;
    double change = 0.0;
    for (int c = 0; c < m; ++c) {
      const double centre = 0.25 * (p00[c] + p01[c] + p10[c] + p11[c]);
      const double v = base[c] + centre * q;
      change = std::max(change, std::abs(v - p10[c]));
      p10[c] = v;
    }
    if (change <= 1e-17) break;
  }
}

// First null level, with level -1 mirrored onto level 1 (p01 = p10):
//   p10 = (p00 + p11)/2 + phi_c |p11 - p00|^2 / 8.
void null_start_node(const double* p00, const double* p11, double* p10, int m) {
  const double k = sq_dist(p11, p00, m) / 8.0;
  for (int c = 0; c < m; ++c) p10[c] = 0.5 * (p00[c] + p11[c]);
  for (int it = 0; it < kMaxFixedPoint; ++it) {
    double change = 0.0;
    for (int c = 0; c < m; ++c) {
      const double centre = 0.25 * (p00[c] + p11[c] + 2.0 * p10[c]);
      const double v = 0.5 * (p00[c] + p11[c]) + centre * k;
      change = std::max(change, std::abs(v - p10[c]));
      p10[c] = v;
    }
    if (change <= 1e-17) break;
  }
}

struct Plan {
  double h = 0.0;
  double dir = 1.0;
  long last_level = 0;       // highest stored time index (in units of h)
  std::vector<long> store;   // time indices (units of h) to store, ascending
};

Plan make_plan(const EvolveOptions& opts) {
  if (!(opts.h_step > 0.0)) throw InputError("evolve: h_step must be positive");
  if (opts.t_final == 0.0) throw InputError("evolve: t_final must be nonzero");
  Plan p;
  p.h = opts.h_step;
  p.dir = opts.t_final > 0.0 ? 1.0 : -1.0;
  auto to_index = [&](double t) {
    if (t * p.dir < 0.0) throw InputError("evolve: slice time has the wrong sign");
    const double r = std::abs(t) / p.h;
    const double k = std::round(r);
    if (std::abs(r - k) > 1e-6) {
      std::ostringstream os;
      os << "evolve: time " << t << " is not a multiple of h_step = " << p.h;
      throw InputError(os.str());
    }
    return static_cast<long>(k);
  };
  p.store.push_back(to_index(opts.t_final));
  for (double t : opts.slice_times) p.store.push_back(to_index(t));
  std::sort(p.store.begin(), p.store.end());
  p.store.erase(std::unique(p.store.begin(), p.store.end()), p.store.end());
  p.last_level = p.store.back();
  return p;
}

void check_dim(int m) {
  if (m > kMaxDim) throw InputError("evolve: target dimension too large");
}

void merge_log(PohlmeyerLog& into, double du, double dv, double orth) {
  into.u_variation = std::max(into.u_variation, du);
  into.v_variation = std::max(into.v_variation, dv);
  into.orthogonality = std::max(into.orthogonality, orth);
}

// Active node range for a layer at |t|: light cone of the support plus two cells.
std::pair<std::size_t, std::size_t> active_range(const Grid1D& g, const SupportWindow& sw, double abs_t) {
  const double h = g.spacing();
  const double lo = sw.lo - abs_t - 2.0 * h;
  const double hi = sw.hi + abs_t + 2.0 * h;
  const double a = std::max(1.0, std::floor((lo - g.x_min()) / h));
  const double b = std::min(static_cast<double>(g.size() - 2), std::ceil((hi - g.x_min()) / h));
  return {static_cast<std::size_t>(a), static_cast<std::size_t>(std::max(a, b))};
}

void store_slice(Evolution& ev, const SphereSlice& proto, const std::vector<double>& layer,
                 std::vector<double> velocity, double t) {
  SphereSlice s(proto.grid(), proto.dim(), t);
  std::copy(layer.begin(), layer.end(), s.data().begin());
  const auto& sw = proto.support();
  s.set_support({sw.lo - std::abs(t), sw.hi + std::abs(t)});
  ev.slices.push_back(std::move(s));
  ev.velocities.push_back(std::move(velocity));
}

void run_leapfrog(const SphereSlice& init, const Plan& plan, const EvolveOptions& opts, Evolution& ev) {
  const int m = init.dim();
  const auto& g = init.grid();
  const std::size_t n = g.size();
  const double h = plan.h;
  const std::vector<double> zero(n * m, 0.0);

  std::vector<double> prev(init.data().begin(), init.data().end());
  std::vector<double> cur = prev;
  std::vector<double> next = prev;
  std::size_t store_pos = 0;
  if (plan.store[store_pos] == 0) store_slice(ev, init, prev, zero, 0.0), ++store_pos;

  double max_unproj = 0.0, max_proj = 0.0;
  PohlmeyerLog log;

  // level 1
  {
    const auto [a, b] = active_range(g, init.support(), h);
    for (std::size_t i = a; i <= b; ++i) {
      double* nn = &cur[i * m];
      leapfrog_start_node(&prev[(i + 1) * m], &prev[(i - 1) * m], &prev[i * m], nn, m);
      const double d = project(nn, m);
      if (d > opts.blowup_guard) blowup(plan.dir * h, g.node(i), d);
      max_unproj = std::max(max_unproj, d);
    }
  }

  for (long level = 1; level <= plan.last_level; ++level) {
    const double t_next = static_cast<double>(level + 1) * h;
    const auto [a, b] = active_range(g, init.support(), t_next);
    for (std::size_t i = a; i <= b; ++i) {
      const double* e = &cur[(i + 1) * m];
      const double* w = &cur[(i - 1) * m];
      const double* s = &prev[i * m];
      const double* c0 = &cur[i * m];
      double* nn = &next[i * m];
      leapfrog_node(e, w, s, c0, nn, m);
      const double d = project(nn, m);
      if (d > opts.blowup_guard) blowup(plan.dir * t_next, g.node(i), d);
      max_unproj = std::max(max_unproj, d);
      double r = 0.0;
      for (int c = 0; c < m; ++c) r += nn[c] * nn[c];
      max_proj = std::max(max_proj, std::abs(std::sqrt(r) - 1.0));

      // u-edges N-W (at v - h) and E-S (at v + h); v-edges E-N (at u + h) and S-W (at u - h).
      const double du = std::abs(sq_dist(nn, w, m) - sq_dist(e, s, m)) / (8.0 * h * h * h);
      const double dv = std::abs(sq_dist(e, nn, m) - sq_dist(s, w, m)) / (8.0 * h * h * h);
      double pu = 0.0, pv = 0.0;
      for (int c = 0; c < m; ++c) {
        pu += c0[c] * ((e[c] - s[c]) + (nn[c] - w[c]));
        pv += c0[c] * ((e[c] - nn[c]) + (s[c] - w[c]));
      }
      merge_log(log, du, dv, std::max(std::abs(pu), std::abs(pv)) / (4.0 * h));
    }
    if (store_pos < plan.store.size() && plan.store[store_pos] == level) {
      std::vector<double> vel(n * m);
      for (std::size_t k = 0; k < n * m; ++k) vel[k] = plan.dir * (next[k] - prev[k]) / (2.0 * h);
      store_slice(ev, init, cur, std::move(vel), plan.dir * static_cast<double>(level) * h);
      ++store_pos;
    }
    std::swap(prev, cur);
    std::swap(cur, next);
  }
  ev.max_unprojected_defect = max_unproj;
  ev.max_sphere_defect = max_proj;
  ev.monitors = log;
}

// Null lattice with spacing delta = h. Level k sits at time k h / 2; even
// levels live on the base grid, odd levels on the grid shifted by h / 2
// (odd-level index j is the node at x_j + h / 2).
void run_null_lattice(const SphereSlice& init, const Plan& plan, const EvolveOptions& opts, Evolution& ev) {
  const int m = init.dim();
  const auto& g = init.grid();
  const std::size_t n = g.size();
  const double h = plan.h;
  const std::vector<double> zero(n * m, 0.0);

  std::vector<double> prev(init.data().begin(), init.data().end());  // level k - 1
  std::vector<double> cur = prev;                                     // level k
  std::vector<double> next = prev;
  std::size_t store_pos = 0;
  if (plan.store[store_pos] == 0) store_slice(ev, init, prev, zero, 0.0), ++store_pos;

  double max_unproj = 0.0, max_proj = 0.0;
  PohlmeyerLog log;

  {
    const auto [a, b] = active_range(g, init.support(), 0.5 * h);
    for (std::size_t j = a - 1; j <= b; ++j) {
      double* p10 = &cur[j * m];
      null_start_node(&prev[j * m], &prev[(j + 1) * m], p10, m);
      const double d = project(p10, m);
      if (d > opts.blowup_guard) blowup(plan.dir * 0.5 * h, g.node(j) + 0.5 * h, d);
      max_unproj = std::max(max_unproj, d);
    }
  }

  const long last_half_level = 2 * plan.last_level;
  for (long level = 1; level <= last_half_level; ++level) {
    const bool next_odd = (level + 1) % 2 == 1;
    const double t_next = 0.5 * static_cast<double>(level + 1) * h;
    const auto [a, b] = active_range(g, init.support(), t_next);
    for (std::size_t j = a; j <= b; ++j) {
      const double* p00 = next_odd ? &cur[j * m] : &cur[(j - 1) * m];
      const double* p11 = next_odd ? &cur[(j + 1) * m] : &cur[j * m];
      const double* p01 = &prev[j * m];
      double* p10 = &next[j * m];
      null_node(p00, p01, p11, p10, m);
      const double d = project(p10, m);
      const double x = g.node(j) + (next_odd ? 0.5 * h : 0.0);
      if (d > opts.blowup_guard) blowup(plan.dir * t_next, x, d);
      max_unproj = std::max(max_unproj, d);
      double r = 0.0;
      for (int c = 0; c < m; ++c) r += p10[c] * p10[c];
      max_proj = std::max(max_proj, std::abs(std::sqrt(r) - 1.0));

      const double du = std::abs(sq_dist(p10, p00, m) - sq_dist(p11, p01, m)) / (h * h * h);
      const double dv = std::abs(sq_dist(p01, p00, m) - sq_dist(p11, p10, m)) / (h * h * h);
      double pu = 0.0, pv = 0.0;
      for (int c = 0; c < m; ++c) {
        const double centre = 0.25 * (p00[c] + p01[c] + p10[c] + p11[c]);
        pu += centre * ((p10[c] - p00[c]) + (p11[c] - p01[c]));
        pv += centre * ((p01[c] - p00[c]) + (p11[c] - p10[c]));
      }
      merge_log(log, du, dv, std::max(std::abs(pu), std::abs(pv)) / (2.0 * h));
    }
    // `cur` is level `level`; store even levels once level + 1 exists.
    if (level % 2 == 0 && store_pos < plan.store.size() && plan.store[store_pos] == level / 2) {
      std::vector<double> vel(n * m, 0.0);
      for (std::size_t i = 1; i + 1 < n; ++i)
        for (int c = 0; c < m; ++c) {
          const double up = 0.5 * (next[(i - 1) * m + c] + next[i * m + c]);
          const double down = 0.5 * (prev[(i - 1) * m + c] + prev[i * m + c]);
          vel[i * m + c] = plan.dir * (up - down) / h;
        }
      store_slice(ev, init, cur, std::move(vel), plan.dir * static_cast<double>(level / 2) * h);
      ++store_pos;
    }
    std::swap(prev, cur);
    std::swap(cur, next);
  }
  ev.max_unprojected_defect = max_unproj;
  ev.max_sphere_defect = max_proj;
  ev.monitors = log;
}

}  // namespace

const SphereSlice& Evolution::slice_at(double t) const {
  for (const auto& s : slices)
    if (std::abs(s.time() - t) <= 1e-9 * std::max(1.0, std::abs(t))) return s;
  std::ostringstream os;
  os << "Evolution: no slice stored at t = " << t;
  throw InputError(os.str());
}

const std::vector<double>& Evolution::velocity_at(double t) const {
  for (std::size_t k = 0; k < slices.size(); ++k)
    if (std::abs(slices[k].time() - t) <= 1e-9 * std::max(1.0, std::abs(t))) return velocities[k];
  std::ostringstream os;
  os << "Evolution: no slice stored at t = " << t;
  throw InputError(os.str());
}

Evolution evolve_from(const SphereSlice& initial, const EvolveOptions& opts) {
  const Plan plan = make_plan(opts);
  check_dim(initial.dim());
  const auto& g = initial.grid();
  if (std::abs(g.spacing() - plan.h) > 1e-12 * plan.h)
    throw InputError("evolve: initial grid spacing must equal h_step");
  const double reach = static_cast<double>(plan.last_level + 1) * plan.h + (opts.margin_nodes - 1) * plan.h;
  const auto& sw = initial.support();
  if (g.x_min() > sw.lo - reach || g.x_max() < sw.hi + reach)
    throw InputError("evolve: initial grid does not contain the light cone of the support");
  for (int c = 0; c < initial.dim(); ++c) {
    const double e = c == 0 ? 1.0 : 0.0;
    if (initial.at(0)[c] != e || initial.at(g.size() - 1)[c] != e)
      throw InputError("evolve: initial data must equal e1 at the grid ends");
  }

  Evolution ev;
  ev.h_step = plan.h;
  ev.scheme = opts.scheme;
  if (opts.scheme == Scheme::leapfrog)
    run_leapfrog(initial, plan, opts, ev);
  else
    run_null_lattice(initial, plan, opts, ev);
  return ev;
}

Evolution evolve(const DataSpec& spec, const EvolveOptions& opts) {
  spec.validate();
  const Plan plan = make_plan(opts);
  const double extent = spec.half_width + static_cast<double>(plan.last_level + 1 + opts.margin_nodes) * plan.h;
  const Grid1D grid = symmetric_grid(plan.h, extent);
  const SphereSlice init = build_initial_data(spec, grid);
  Evolution ev = evolve_from(init, opts);
  ev.spec = spec;
  return ev;
}

SphereSlice circle_exact(const ScalarFunction& theta, const Grid1D& grid, double t) {
  SphereSlice s(grid, 2, t);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    const double th = 0.5 * (theta(x + t) + theta(x - t));
    s.at(i)[0] = std::cos(th);
    s.at(i)[1] = std::sin(th);
  }
  return s;
}

PohlmeyerLog pohlmeyer_residual(const Evolution& ev) {
  if (ev.slices.size() < 2) throw InputError("pohlmeyer_residual: need at least two stored slices");
  PohlmeyerLog log;
  const int m = ev.slices.front().dim();

  // |phi_u|^2 and |phi_v|^2 at interior nodes, centred differences in x.
  auto null_speeds = [&](std::size_t k, std::size_t i, double& qu, double& qv, double& orth) {
    const auto& s = ev.slices[k];
    const auto& vel = ev.velocities[k];
    const double h = s.grid().spacing();
    qu = qv = 0.0;
    double pu = 0.0, pv = 0.0;
    for (int c = 0; c < m; ++c) {
      const double px = (s.at(i + 1)[c] - s.at(i - 1)[c]) / (2.0 * h);
      const double pt = vel[i * m + c];
      const double u = 0.5 * (px + pt);
      const double v = 0.5 * (px - pt);
      qu += u * u;
      qv += v * v;
      pu += s.at(i)[c] * u;
      pv += s.at(i)[c] * v;
    }
    orth = std::max(std::abs(pu), std::abs(pv));
  };

  for (std::size_t k = 0; k + 1 < ev.slices.size(); ++k) {
    const auto& a = ev.slices[k];
    const auto& b = ev.slices[k + 1];
    const auto& g = a.grid();
    const double dt = b.time() - a.time();
    const long shift = std::lround(dt / g.spacing());
    const double null_len = 2.0 * std::abs(dt);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
      double qu_b, qv_b, orth_b;
      null_speeds(k + 1, i, qu_b, qv_b, orth_b);
      log.orthogonality = std::max(log.orthogonality, orth_b);
      // constant u = x + t: node i at time b meets node i + shift at time a
      const long iu = static_cast<long>(i) + shift;
      const long iv = static_cast<long>(i) - shift;
      if (iu >= 1 && iu + 1 < static_cast<long>(g.size())) {
        double qu_a, qv_a, o;
        null_speeds(k, static_cast<std::size_t>(iu), qu_a, qv_a, o);
        log.u_variation = std::max(log.u_variation, std::abs(qu_b - qu_a) / null_len);
      }
      if (iv >= 1 && iv + 1 < static_cast<long>(g.size())) {
        double qu_a, qv_a, o;
        null_speeds(k, static_cast<std::size_t>(iv), qu_a, qv_a, o);
        log.v_variation = std::max(log.v_variation, std::abs(qv_b - qv_a) / null_len);
      }
    }
  }
  return log;
}

}  // namespace wavemap
