#include "wavemap/cli.hpp"

#include "wavemap/data.hpp"
#include "wavemap/evolve.hpp"
#include "wavemap/experiments.hpp"
#include "wavemap/perturb.hpp"
#include "wavemap/spectral.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#ifndef WAVEMAP_VERSION
#define WAVEMAP_VERSION "unknown"
#endif

namespace wavemap::cli {

namespace fs = std::filesystem;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError(what + ": cannot parse number '" + s + "'");
  }
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw OutputError("cannot write " + path.string());
  return os;
}

void close_output(std::ofstream& os, const fs::path& path) {
  os.flush();
  if (!os) throw OutputError("write failed for " + path.string());
}

// CSV with '# key=value' metadata and a header row.
class CsvFile {
 public:
  CsvFile(const fs::path& path, const Metadata& meta, const std::vector<std::string>& header)
      : path_(path), os_(open_output(path)) {
    for (const auto& [k, v] : meta) os_ << "# " << k << "=" << v << "\n";
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << "\n";
  }
  void row(const std::vector<double>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << format_double(cells[i]);
    os_ << "\n";
  }
  ~CsvFile() = default;
  void close() { close_output(os_, path_); }

 private:
  fs::path path_;
  std::ofstream os_;
};

void write_kv(const fs::path& path, const Metadata& kv) {
  auto os = open_output(path);
  for (const auto& [k, v] : kv) os << k << "=" << v << "\n";
  close_output(os, path);
}

void write_text(const fs::path& path, const std::string& text) {
  auto os = open_output(path);
  os << text;
  close_output(os, path);
}

std::string opt_value(std::optional<double> v) { return v ? format_double(*v) : "nan"; }

// ---------------------------------------------------------------------------
// Slice and profile files.

struct Table {
  std::map<std::string, std::string> meta;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read_table(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot read " + path.string());
  Table t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos) t.meta[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
      continue;
    }
    if (t.header.empty()) {
      t.header = split(line, ',');
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != t.header.size()) {
      std::ostringstream os;
      os << path.string() << ":" << lineno << ": expected " << t.header.size() << " columns, found " << cells.size();
      throw InputError(os.str());
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c, path.string()));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty() || t.rows.size() < 2) throw InputError(path.string() + ": no data rows");
  return t;
}

Grid1D uniform_grid(const std::vector<double>& x, const std::string& where) {
  const std::size_t n = x.size();
  const double h = (x.back() - x.front()) / static_cast<double>(n - 1);
  if (!(h > 0.0)) throw InputError(where + ": grid is not increasing");
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(x[i] - (x.front() + static_cast<double>(i) * h)) > 1e-9 * h)
      throw InputError(where + ": grid is not uniform");
  return Grid1D::from_spacing(x.front(), h, n);
}

double meta_double(const std::map<std::string, std::string>& meta, const std::string& key, const std::string& where) {
  const auto it = meta.find(key);
  if (it == meta.end()) throw InputError(where + ": missing metadata '" + key + "'");
  return parse_double(it->second, where);
}

}  // namespace

void write_slice(const fs::path& path, const SphereSlice& slice, const Metadata& meta) {
  Metadata all = meta;
  all.emplace_back("t", format_double(slice.time()));
  all.emplace_back("h", format_double(slice.grid().spacing()));
  all.emplace_back("support_lo", format_double(slice.support().lo));
  all.emplace_back("support_hi", format_double(slice.support().hi));
  std::vector<std::string> header{"x"};
  for (int c = 1; c <= slice.dim(); ++c) header.push_back("phi_" + std::to_string(c));
  CsvFile f(path, all, header);
  std::vector<double> row(static_cast<std::size_t>(slice.dim()) + 1);
  for (std::size_t i = 0; i < slice.size(); ++i) {
    row[0] = slice.grid().node(i);
    const auto v = slice.at(i);
    std::copy(v.begin(), v.end(), row.begin() + 1);
    f.row(row);
  }
  f.close();
}

SphereSlice read_slice(const fs::path& path, std::map<std::string, std::string>* meta) {
  const auto t = read_table(path);
  const int m = static_cast<int>(t.header.size()) - 1;
  if (m < 2) throw InputError(path.string() + ": a slice needs x and at least two components");
  std::vector<double> x;
  for (const auto& r : t.rows) x.push_back(r[0]);
  const auto grid = uniform_grid(x, path.string());
  const double time = t.meta.count("t") ? parse_double(t.meta.at("t"), path.string()) : 0.0;
  SphereSlice s(grid, m, time);
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (int c = 0; c < m; ++c) s.at(i)[c] = t.rows[i][static_cast<std::size_t>(c) + 1];
  if (t.meta.count("support_lo") && t.meta.count("support_hi"))
    s.set_support({parse_double(t.meta.at("support_lo"), path.string()),
                   parse_double(t.meta.at("support_hi"), path.string())});
  else
    s.set_support({grid.x_min(), grid.x_max()});
  if (meta) *meta = t.meta;
  return s;
}

void write_profile(const fs::path& path, const AsymptoticProfile& p, const Metadata& meta) {
  Metadata all = meta;
  all.emplace_back("C", format_double(p.half_width));
  all.emplace_back("alpha", join(p.alpha));
  all.emplace_back("residual", format_double(p.residual));
  all.emplace_back("source_time", format_double(p.source_time));
  std::vector<std::string> header{"s"};
  for (int c = 1; c <= p.m; ++c) header.push_back("F_" + std::to_string(c));
  for (int c = 1; c <= p.m; ++c) header.push_back("G_" + std::to_string(c));
  CsvFile f(path, all, header);
  const auto m = static_cast<std::size_t>(p.m);
  std::vector<double> row(2 * m + 1);
  for (std::size_t i = 0; i < p.s_grid.size(); ++i) {
    row[0] = p.s_grid.node(i);
    for (std::size_t c = 0; c < m; ++c) {
      row[1 + c] = p.F[i * m + c];
      row[1 + m + c] = p.G[i * m + c];
    }
    f.row(row);
  }
  f.close();
}

AsymptoticProfile read_profile(const fs::path& path) {
  const auto t = read_table(path);
  const std::string where = path.string();
  if (t.header.size() < 5 || t.header.size() % 2 == 0) throw InputError(where + ": not a profile file");
  AsymptoticProfile p;
  p.m = static_cast<int>((t.header.size() - 1) / 2);
  p.half_width = meta_double(t.meta, "C", where);
  p.residual = t.meta.count("residual") ? meta_double(t.meta, "residual", where) : 0.0;
  p.source_time = t.meta.count("source_time") ? meta_double(t.meta, "source_time", where) : 0.0;
  if (!t.meta.count("alpha")) throw InputError(where + ": missing metadata 'alpha'");
  for (const auto& a : split(t.meta.at("alpha"), ',')) p.alpha.push_back(parse_double(a, where));
  if (static_cast<int>(p.alpha.size()) != p.m) throw InputError(where + ": alpha has the wrong dimension");
  std::vector<double> s;
  for (const auto& r : t.rows) s.push_back(r[0]);
  p.s_grid = uniform_grid(s, where);
  const auto m = static_cast<std::size_t>(p.m);
  for (const auto& r : t.rows) {
    p.F.insert(p.F.end(), r.begin() + 1, r.begin() + 1 + static_cast<long>(m));
    p.G.insert(p.G.end(), r.begin() + 1 + static_cast<long>(m), r.end());
  }
  return p;
}

std::map<std::string, std::string> read_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot read config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::ostringstream os;
      os << path.string() << ":" << lineno << ": expected key=value";
      throw InputError(os.str());
    }
    const auto key = trim(line.substr(0, eq));
    if (out.count(key)) throw InputError(path.string() + ": repeated key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

fs::path resolve_output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("WAVEMAP_OUTDIR"); env && *env) return env;
  return ".";
}

namespace {

// ---------------------------------------------------------------------------
// Parameters.

struct Common {
  std::string config;
  std::string out;
  unsigned jobs = 0;
};

struct DataParams {
  double C = 1.0;
  double eps = 0.3;
  int m = 3;
  std::optional<int> truncation;
};

DataSpec make_spec(const DataParams& p) {
  auto spec = default_spec(p.C, p.eps, p.m);
  spec.truncation = p.truncation;
  spec.validate();
  return spec;
}

Metadata spec_meta(const DataSpec& s) {
  return {{"C", format_double(s.half_width)},
          {"eps", format_double(s.eps)},
          {"m", std::to_string(s.m)},
          {"bump", s.bump.id},
          {"truncation", s.truncation ? std::to_string(*s.truncation) : "closed-form"}};
}

void add_data_options(CLI::App* sub, DataParams& p) {
  sub->add_option("-C,--half-width", p.C, "support half-width C");
  sub->add_option("--eps", p.eps, "data amplitude");
  sub->add_option("-m,--m", p.m, "target dimension (sphere S^{m-1} in R^m)");
}

double step_from_cells(double C, double cells) {
  if (!(cells >= 1.0)) throw InputError("cells per half-width must be at least 1");
  return C / cells;
}

struct Run {
  fs::path out;
  std::vector<std::string> outputs;
  fs::path file(const std::string& name) {
    outputs.push_back(name);
    return out / name;
  }
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw OutputError("cannot create output directory " + dir.string());
}

void write_manifest(Run& run, const CLI::App& root, const CLI::App& sub) {
  Metadata kv;
  kv.emplace_back("code_version", WAVEMAP_VERSION);
  kv.emplace_back("subcommand", sub.get_name());
  kv.emplace_back("deterministic", "true");
  auto add_opts = [&](const CLI::App& app) {
    for (const auto* opt : app.get_options()) {
      if (opt->get_name().empty() || opt->get_single_name() == "help" || opt->get_single_name() == "version" ||
          opt->get_single_name() == "config")
        continue;
      std::string value;
      if (opt->count() > 0) {
        const auto& r = opt->results();
        for (std::size_t i = 0; i < r.size(); ++i) value += (i ? "," : "") + r[i];
      } else {
        value = opt->get_default_str();
      }
      kv.emplace_back("param." + opt->get_single_name(), value);
    }
  };
  add_opts(root);
  add_opts(sub);
  for (const auto& o : run.outputs) kv.emplace_back("output", o);
  write_kv(run.out / ("manifest_" + sub.get_name() + ".txt"), kv);
}

std::string series_or_empty(const std::optional<LinearFit>& f, double LinearFit::*field) {
  return f ? format_double((*f).*field) : "nan";
}

// ---------------------------------------------------------------------------
// Subcommands.

void cmd_gen_data(Run& run, const DataParams& dp, double cells, std::optional<double> extent) {
  const auto spec = make_spec(dp);
  const double h = step_from_cells(spec.half_width, cells);
  const auto grid = symmetric_grid(h, extent.value_or(spec.half_width + 8.0 * h));
  const auto slice = build_initial_data(spec, grid);
  const auto sm = smallness_check(slice, spec);
  write_slice(run.file("data.csv"), slice, spec_meta(spec));
  write_kv(run.file("data.txt"), {{"max_deviation", format_double(sm.max_deviation)},
                                  {"max_scaled_derivative", format_double(sm.max_scaled_derivative)},
                                  {"bound", format_double(sm.bound)},
                                  {"support_leak", format_double(sm.support_leak)},
                                  {"smallness_ok", sm.ok ? "true" : "false"},
                                  {"cubic_moment", spec.m >= 3 ? format_double(cubic_moment(spec.bump.components[1]))
                                                               : "nan"}});
  std::cout << "gen-data: " << slice.size() << " nodes, max |f - e1| = " << format_double(sm.max_deviation) << "\n";
}

void cmd_evolve(Run& run, const DataParams& dp, double cells, std::optional<double> t_final,
                const std::vector<double>& slice_times, const std::string& scheme) {
  const auto spec = make_spec(dp);
  EvolveOptions eo;
  eo.h_step = step_from_cells(spec.half_width, cells);
  eo.t_final = t_final.value_or(2.0 * spec.half_width);
  eo.slice_times = slice_times;
  if (scheme == "leapfrog")
    eo.scheme = Scheme::leapfrog;
  else if (scheme == "null")
    eo.scheme = Scheme::null_lattice;
  else
    throw InputError("evolve: unknown scheme '" + scheme + "' (leapfrog or null)");
  const auto ev = evolve(spec, eo);
  for (std::size_t k = 0; k < ev.slices.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "slice_%03zu.csv", k);
    auto meta = spec_meta(spec);
    meta.emplace_back("scheme", scheme);
    write_slice(run.file(name), ev.slices[k], meta);
  }
  Metadata kv{{"h_step", format_double(ev.h_step)},
              {"scheme", scheme},
              {"max_sphere_defect", format_double(ev.max_sphere_defect)},
              {"max_unprojected_defect", format_double(ev.max_unprojected_defect)},
              {"pohlmeyer_u_variation", format_double(ev.monitors.u_variation)},
              {"pohlmeyer_v_variation", format_double(ev.monitors.v_variation)},
              {"orthogonality", format_double(ev.monitors.orthogonality)}};
  if (ev.slices.size() >= 2) {
    const auto log = pohlmeyer_residual(ev);
    kv.emplace_back("slice_pohlmeyer_u_variation", format_double(log.u_variation));
    kv.emplace_back("slice_pohlmeyer_v_variation", format_double(log.v_variation));
  }
  write_kv(run.file("evolve.txt"), kv);
  std::cout << "evolve: " << ev.slices.size() << " slices, sphere defect " << format_double(ev.max_sphere_defect)
            << "\n";
}

void cmd_profile(Run& run, const DataParams& dp, double cells, double t0_factor, const std::string& slice_path) {
  AsymptoticProfile p;
  Metadata meta;
  std::optional<ConsistencyReport> cons;
  if (!slice_path.empty()) {
    std::map<std::string, std::string> m;
    const auto slice = read_slice(slice_path, &m);
    const double c = m.count("C") ? parse_double(m.at("C"), slice_path) : dp.C;
    p = extract_profile(slice, c);
    meta.emplace_back("source", slice_path);
  } else {
    const auto spec = make_spec(dp);
    EvolveOptions eo;
    eo.h_step = step_from_cells(spec.half_width, cells);
    eo.t_final = t0_factor * spec.half_width;
    eo.slice_times = {0.5 * eo.t_final};
    const auto ev = evolve(spec, eo);
    p = extract_profile(ev.slices.back(), spec.half_width);
    cons = consistency_check(ev, p);
    meta = spec_meta(spec);
  }
  write_profile(run.file("profile.csv"), p, meta);
  auto d = p.alpha;
  d[0] -= 1.0;
  Metadata kv{{"alpha", join(p.alpha)},
              {"alpha_minus_e1", join(d)},
              {"alpha_deviation", format_double(norm(d))},
              {"residual", format_double(p.residual)},
              {"source_time", format_double(p.source_time)}};
  if (cons) {
    kv.emplace_back("incoming_flatness", format_double(cons->incoming_flatness));
    kv.emplace_back("outgoing_flatness", format_double(cons->outgoing_flatness));
    kv.emplace_back("interior_deviation", format_double(cons->interior_deviation));
  }
  write_kv(run.file("profile.txt"), kv);
  std::cout << "profile: |alpha - e1| = " << format_double(norm(d)) << "\n";
}

void cmd_norms(Run& run, const std::vector<std::string>& slices, const std::string& profile_path,
               const std::vector<double>& T_list, double dx_cells, const LowerBoundWindow& window) {
  if (slices.empty() && T_list.empty()) throw InputError("norms: give --slice files or --T with --profile");
  std::optional<AsymptoticProfile> prof;
  if (!profile_path.empty()) prof = read_profile(profile_path);
  if (!T_list.empty() && !prof) throw InputError("norms: --T requires --profile");

  CsvFile table(run.file("norms.csv"),
                {{"kappa_low", format_double(window.kappa_low)}, {"kappa_high", format_double(window.kappa_high)}},
                {"source", "T", "hdot_half", "besov", "lower_bound"});
  CsvFile blocks(run.file("norm_blocks.csv"), {}, {"source", "T", "j", "value"});
  auto emit = [&](const std::string& src, const NormReport& r) {
    table.row({src, format_double(r.T), format_double(r.hdot_half), format_double(r.besov), opt_value(r.lower_bound)});
    for (const auto& b : r.blocks) blocks.row({src, format_double(r.T), std::to_string(b.j), format_double(b.value)});
  };
  for (const auto& path : slices) {
    const auto s = read_slice(path);
    emit(path, compute_norms(s, prof ? &*prof : nullptr, window));
  }
  for (double T : T_list) {
    const auto s = synthesize_slice(*prof, T, prof->half_width / dx_cells);
    emit("synthesized", compute_norms(s, &*prof, window));
  }
  table.close();
  blocks.close();
  std::cout << "norms: " << slices.size() + T_list.size() << " reports\n";
}

void cmd_perturb(Run& run, const DataParams& dp, std::size_t cells, const std::vector<double>& eps_list) {
  if (dp.m < 3) throw InputError("perturb: requires m >= 3 (the circle target has no quintic obstruction)");
  auto p = dp;
  p.eps = std::min(p.eps, 0.5);
  const auto spec = make_spec(p);
  const auto rep = perturbation_report(spec.bump, cells);
  const PerturbationSeries series(spec.bump);
  const double finer = check_hierarchy(series, 3, 2 * cells);
  const auto& q = rep.quadratures;
  Metadata kv{{"C", format_double(spec.half_width)},
              {"m", std::to_string(spec.m)},
              {"bump", spec.bump.id},
              {"A", format_double(q.A)},
              {"B", format_double(q.B)},
              {"D", format_double(q.D)},
              {"E", format_double(q.E)},
              {"B_plus_A", format_double(q.B + q.A)},
              {"D_plus_half_E", format_double(q.D + 0.5 * q.E)},
              {"scale_AB", format_double(q.scale_AB)},
              {"scale_DE", format_double(q.scale_DE)},
              {"da_sum", format_double(q.da_sum())},
              {"da_sum_minus_half_AE", format_double(q.da_sum() - 0.5 * q.A * q.E)},
              {"H_C", join(rep.H_C)},
              {"H_C_symmetric_part", format_double(rep.H_C_symmetric_part)},
              {"lemma_residual", format_double(rep.lemma.residual)},
              {"lemma_reduced_residual", format_double(rep.lemma.reduced_residual)},
              {"lemma_scale", format_double(rep.lemma.scale)},
              {"mean_zero_values", join(rep.mean_zero.values)},
              {"mean_zero_scale", format_double(rep.mean_zero.scale)},
              {"hierarchy_cells", std::to_string(cells)},
              {"hierarchy_residuals", join(rep.hierarchy_residuals)},
              {"hierarchy_phi3_residual_half_spacing", format_double(finer)},
              {"hierarchy_phi3_order", format_double(std::log2(rep.hierarchy_residuals[2] / finer))},
              {"kappa", format_double(kAlphaKappa)},
              {"predicted_c5", join(rep.predicted_c5)},
              {"predicted_c5_e2_closed_form", format_double(rep.predicted_c5_e2_closed_form)}};
  write_kv(run.file("perturb.txt"), kv);
  CsvFile f(run.file("prediction.csv"), {{"kappa", format_double(kAlphaKappa)}},
            {"eps", "predicted_e2", "predicted_e2_quadrature", "predicted_e3_quadrature"});
  for (double e : eps_list) {
    const double e5 = std::pow(e, 5);
    f.row(std::vector<double>{e, rep.predicted_c5_e2_closed_form * e5, rep.predicted_c5[1] * e5,
                              rep.predicted_c5.size() > 2 ? rep.predicted_c5[2] * e5 : 0.0});
  }
  f.close();
  std::cout << "perturb: A = " << format_double(q.A) << ", E = " << format_double(q.E)
            << ", kappa A E = " << format_double(rep.predicted_c5_e2_closed_form) << "\n";
}

void cmd_sweep_eps(Run& run, double C, const std::vector<double>& eps_list, const std::vector<double>& cells,
                   double t0_factor, unsigned jobs, bool plot) {
  EpsSweepOptions o;
  o.eps_list = eps_list;
  for (double n : cells) o.h_list.push_back(step_from_cells(C, n));
  o.t0_factor = t0_factor;
  o.jobs = jobs;
  const auto pair = make_bump_pair(C);
  const auto r = run_eps_sweep(pair, o);

  std::vector<std::string> header{"eps"};
  for (double n : cells) header.push_back("e2_cells_" + format_double(n));
  for (const char* h : {"e2_extrapolated", "e3_extrapolated", "perp", "richardson_change", "converged",
                        "predicted_e2", "fit_exponent", "fit_coefficient", "predicted_coefficient"})
    header.push_back(h);
  CsvFile f(run.file("sweep_eps.csv"), {{"C", format_double(C)}, {"bump", pair.id}}, header);
  for (const auto& pt : r.points) {
    std::vector<std::string> row{format_double(pt.eps)};
    for (const auto& d : pt.deviation) row.push_back(format_double(d[1]));
    row.push_back(format_double(pt.e2));
    row.push_back(format_double(pt.extrapolated.size() > 2 ? pt.extrapolated[2] : 0.0));
    row.push_back(format_double(pt.perp));
    row.push_back(format_double(pt.richardson_change));
    row.push_back(pt.converged ? "1" : "0");
    row.push_back(format_double(r.predicted * std::pow(pt.eps, 5)));
    row.push_back(format_double(r.exponent));
    row.push_back(format_double(r.coefficient));
    row.push_back(format_double(r.predicted));
    f.row(row);
  }
  f.close();
  write_kv(run.file("sweep_eps.txt"), {{"exponent", format_double(r.exponent)},
                                       {"exponent_stderr", format_double(r.fit.slope_stderr)},
                                       {"r_squared", format_double(r.fit.r_squared)},
                                       {"coefficient", format_double(r.coefficient)},
                                       {"coefficient_p5", format_double(r.coefficient_p5)},
                                       {"predicted", format_double(r.predicted)},
                                       {"predicted_c5", join(r.predicted_c5)},
                                       {"relative_error", format_double(r.relative_error)},
                                       {"perp_exponent", format_double(r.perp_fit.slope)},
                                       {"pair_exponents", join(r.pair_exponents)},
                                       {"A", format_double(r.quadratures.A)},
                                       {"E", format_double(r.quadratures.E)}});
  if (plot) {
    PlotSeries meas{"|(alpha - e1).e2|", {}, {}}, pred{"kappa A E eps^5", {}, {}};
    for (const auto& pt : r.points) {
      meas.x.push_back(pt.eps);
      meas.y.push_back(std::abs(pt.e2));
      pred.x.push_back(pt.eps);
      pred.y.push_back(std::abs(r.predicted) * std::pow(pt.eps, 5));
    }
    write_text(run.file("sweep_eps.svg"),
               svg_line_plot({meas, pred}, "alpha deviation against eps", "log10 eps", "log10 |alpha - e1|", true, true));
  }
  std::cout << "sweep-eps: exponent " << format_double(r.exponent) << ", coefficient " << format_double(r.coefficient)
            << " (predicted " << format_double(r.predicted) << ")\n";
}

void cmd_sweep_growth(Run& run, const DataParams& dp, double cells, double t0_factor, double t_min, double t_max,
                      std::size_t t_count, double dx_cells, const LowerBoundWindow& window, unsigned jobs, bool plot) {
  const auto spec = make_spec(dp);
  const double c = spec.half_width;
  GrowthOptions o;
  o.h_step = step_from_cells(c, cells);
  o.t0_factor = t0_factor;
  o.synth_dx = c / dx_cells;
  o.T_list = log_spaced(t_min * c, t_max * c, t_count, o.synth_dx);
  o.window = window;
  o.jobs = jobs;
  const auto g = run_growth(spec, o);

  auto meta = spec_meta(spec);
  meta.emplace_back("kappa_low", format_double(window.kappa_low));
  meta.emplace_back("kappa_high", format_double(window.kappa_high));
  CsvFile f(run.file("growth.csv"), meta, {"T", "hdot_half", "hdot_half_sq", "besov", "lower_bound"});
  CsvFile b(run.file("growth_blocks.csv"), {}, {"T", "j", "value"});
  for (const auto& s : g.samples) {
    f.row({format_double(s.T), format_double(s.hdot_half), format_double(s.hdot_half * s.hdot_half),
           format_double(s.besov), opt_value(s.lower_bound)});
    for (const auto& bl : s.blocks) b.row({format_double(s.T), std::to_string(bl.j), format_double(bl.value)});
  }
  f.close();
  b.close();
  write_kv(run.file("growth.txt"),
           {{"T0", format_double(g.T0)},
            {"alpha", join(g.alpha)},
            {"alpha_deviation", format_double(g.alpha_deviation)},
            {"profile_residual", format_double(g.profile_residual)},
            {"hdot_sq_slope", format_double(g.hdot_sq_fit.slope)},
            {"hdot_sq_intercept", format_double(g.hdot_sq_fit.intercept)},
            {"hdot_sq_r_squared", format_double(g.hdot_sq_fit.r_squared)},
            {"besov_slope", format_double(g.besov_fit.slope)},
            {"besov_intercept", format_double(g.besov_fit.intercept)},
            {"besov_r_squared", format_double(g.besov_fit.r_squared)},
            {"lower_bound_slope", series_or_empty(g.lower_bound_fit, &LinearFit::slope)},
            {"lower_bound_r_squared", series_or_empty(g.lower_bound_fit, &LinearFit::r_squared)},
            {"predicted_hdot_sq_slope", format_double(g.predicted_hdot_sq_slope)},
            {"predicted_besov_slope", format_double(g.predicted_besov_slope)},
            {"predicted_lower_bound_slope", format_double(g.predicted_lower_bound_slope)},
            {"lower_bound_excess", format_double(g.lower_bound_excess)}});
  if (plot) {
    PlotSeries hs{"hdot_half^2", {}, {}}, bs{"besov", {}, {}};
    for (const auto& s : g.samples) {
      hs.x.push_back(s.T);
      hs.y.push_back(s.hdot_half * s.hdot_half);
      bs.x.push_back(s.T);
      bs.y.push_back(s.besov);
    }
    write_text(run.file("growth_hdot.svg"), svg_line_plot({hs}, "critical Sobolev norm", "log10 T", "hdot^2", true, false));
    write_text(run.file("growth_besov.svg"), svg_line_plot({bs}, "critical Besov norm", "log10 T", "besov", true, false));
  }
  std::cout << "sweep-growth: hdot^2 slope " << format_double(g.hdot_sq_fit.slope) << " (R^2 "
            << format_double(g.hdot_sq_fit.r_squared) << "), besov slope " << format_double(g.besov_fit.slope)
            << " (R^2 " << format_double(g.besov_fit.r_squared) << ")\n";
}

void cmd_convergence(Run& run, const DataParams& dp, const std::vector<double>& cells, double t_factor,
                     unsigned jobs) {
  auto p = dp;
  p.m = 2;
  const auto spec = make_spec(p);
  ConvergenceOptions o;
  for (double n : cells) o.h_list.push_back(step_from_cells(spec.half_width, n));
  o.t_final_factor = t_factor;
  o.jobs = jobs;
  const auto r = run_convergence(spec, o);
  CsvFile f(run.file("convergence.csv"), spec_meta(spec),
            {"h", "max_error", "order", "pohlmeyer_u", "pohlmeyer_v", "pohlmeyer_order", "sphere_defect"});
  for (std::size_t k = 0; k < r.levels.size(); ++k) {
    const auto& l = r.levels[k];
    f.row(std::vector<double>{l.h, l.max_error, k ? r.orders[k - 1] : std::nan(""), l.monitors.u_variation,
                              l.monitors.v_variation, k ? r.pohlmeyer_orders[k - 1] : std::nan(""),
                              l.sphere_defect});
  }
  f.close();
  write_kv(run.file("convergence.txt"), {{"observed_order", format_double(r.observed_order)},
                                         {"pohlmeyer_order", format_double(r.pohlmeyer_order)},
                                         {"orders", join(r.orders)},
                                         {"pohlmeyer_orders", join(r.pohlmeyer_orders)}});
  std::cout << "convergence: order " << format_double(r.observed_order) << ", Pohlmeyer order "
            << format_double(r.pohlmeyer_order) << "\n";
  if (r.observed_order < 1.5) throw NumericalError("convergence: observed order below 1.5");
}

void cmd_cascade(Run& run, int k, double eps, double C, double cells, unsigned jobs) {
  CascadeOptions o;
  o.k_scales = k;
  o.eps = eps;
  o.half_width = C;
  o.h_step = step_from_cells(C, cells);
  o.jobs = jobs;
  const auto r = run_cascade(o);
  CsvFile f(run.file("cascade.csv"), {{"t_end", format_double(r.t_end)}},
            {"lambda", "amplitude", "center", "data_hdot_half", "data_besov", "independence_deviation",
             "scheme_error", "alpha_e2", "predicted_alpha_e2", "growth_hdot_sq_slope", "growth_besov_slope"});
  for (const auto& c : r.copies)
    f.row(std::vector<double>{c.lambda, c.amplitude, c.center, c.data_hdot_half, c.data_besov,
                              c.independence_deviation, c.scheme_error, c.alpha_e2, c.predicted_alpha_e2,
                              c.growth.hdot_sq_fit.slope, c.growth.besov_fit.slope});
  f.close();
  write_kv(run.file("cascade.txt"), {{"t_end", format_double(r.t_end)},
                                     {"data_besov", format_double(r.data_besov)},
                                     {"scale_invariance_error", format_double(r.scale_invariance_error)}});
  std::cout << "cascade: " << r.copies.size() << " copies, scale invariance error "
            << format_double(r.scale_invariance_error) << "\n";
}

void cmd_heaviside(Run& run, double C, int j_min, int j_max, int fit_blocks) {
  const auto h = ScalarBump::asymmetric(C);
  const auto r = heaviside_demo(h, j_min, j_max, fit_blocks);
  CsvFile f(run.file("heaviside.csv"), {{"C", format_double(C)}, {"jump", format_double(r.jump)}},
            {"j", "block", "partial_sum", "xi", "symbol"});
  for (std::size_t k = 0; k < r.blocks.size(); ++k)
    f.row({std::to_string(r.blocks[k].j), format_double(r.blocks[k].value), format_double(r.partial_sums[k]),
           format_double(r.symbol_samples[k].first), format_double(r.symbol_samples[k].second)});
  f.close();
  CsvFile w(run.file("heaviside_w.csv"), {{"C", format_double(C)}}, {"x", "w"});
  for (std::size_t i = 0; i < r.w_grid.size(); ++i) w.row(std::vector<double>{r.w_grid.node(i), r.w[i]});
  w.close();
  write_kv(run.file("heaviside.txt"), {{"jump", format_double(r.jump)},
                                       {"predicted_block_value", format_double(r.predicted_block_value)},
                                       {"partial_sum_slope", format_double(r.partial_sum_fit.slope)},
                                       {"partial_sum_r_squared", format_double(r.partial_sum_fit.r_squared)}});
  std::cout << "demo-heaviside: low blocks -> " << format_double(r.predicted_block_value) << ", partial-sum slope "
            << format_double(r.partial_sum_fit.slope) << "\n";
}

// Applies key=value pairs from the config file as option defaults so that
// command-line flags still win.
void apply_config(CLI::App& root, CLI::App* sub, const std::map<std::string, std::string>& cfg) {
  for (const auto& [key, value] : cfg) {
    CLI::Option* opt = nullptr;
    if (sub) opt = sub->get_option_no_throw("--" + key);
    if (!opt) opt = root.get_option_no_throw("--" + key);
    if (!opt) throw InputError("config: unknown key '" + key + "'");
    opt->default_val(value);
  }
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Wave maps into spheres: counterexample data, evolution and critical-norm growth", "wavemap"};
  app.set_version_flag("--version", std::string(WAVEMAP_VERSION));
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();

  Common common;
  app.add_option("--config", common.config, "flat key=value file; command-line flags win");
  app.add_option("--out", common.out, "output directory (default: $WAVEMAP_OUTDIR or .)");
  app.add_option("--jobs", common.jobs, "concurrent jobs for sweeps (0 = hardware)");

  DataParams dp;
  double cells = 256.0;
  std::optional<double> extent, t_final;
  std::optional<int> truncation;
  std::vector<double> slice_times;
  std::string scheme = "leapfrog";
  double t0_factor = 4.0;
  std::string slice_path, profile_path;
  std::vector<std::string> slice_paths;
  std::vector<double> T_list;
  double dx_cells = 64.0;
  LowerBoundWindow window;
  std::size_t hier_cells = 512;
  std::vector<double> eps_list = {0.05, 0.07, 0.1, 0.14, 0.2, 0.28, 0.4};
  std::vector<double> cells_list;
  double t_min = 10.0, t_max = 1e4;
  std::size_t t_count = 13;
  bool plot = false;
  int k_scales = 2;
  int j_min = -14, j_max = 3, fit_blocks = 8;

  auto* gen = app.add_subcommand("gen-data", "write the counterexample initial data");
  add_data_options(gen, dp);
  gen->add_option("--cells", cells, "grid cells per half-width (h = C / cells)");
  gen->add_option("--extent", extent, "grid covers [-extent, extent] (default C + 8h)");
  gen->add_option("--truncation", truncation, "partial-sum order instead of the resummed closed form");

  auto* evo = app.add_subcommand("evolve", "evolve the data and write slices");
  add_data_options(evo, dp);
  evo->add_option("--cells", cells, "grid cells per half-width (h = C / cells)");
  evo->add_option("--t-final", t_final, "final time (default 2C; negative evolves backwards)");
  evo->add_option("--slice-times", slice_times, "extra slice times")->delimiter(',');
  evo->add_option("--scheme", scheme, "leapfrog or null");

  auto* prof = app.add_subcommand("profile", "extract (F, G, alpha) from a slice or a fresh evolution");
  add_data_options(prof, dp);
  prof->add_option("--cells", cells, "grid cells per half-width for the evolution");
  prof->add_option("--t0", t0_factor, "extraction time in units of C");
  prof->add_option("--slice", slice_path, "slice file to read instead of evolving");

  auto* nrm = app.add_subcommand("norms", "critical norms of slices or synthesized slices");
  nrm->add_option("--slice", slice_paths, "slice files")->delimiter(',');
  nrm->add_option("--profile", profile_path, "profile file (enables the lower bound and --T)");
  nrm->add_option("--T", T_list, "times to synthesize from the profile")->delimiter(',');
  nrm->add_option("--dx-cells", dx_cells, "synthesis spacing C / dx-cells");
  nrm->add_option("--kappa-low", window.kappa_low, "lower-bound window starts at kappa-low / T");
  nrm->add_option("--kappa-high", window.kappa_high, "lower-bound window ends at kappa-high / C");

  auto* per = app.add_subcommand("perturb", "perturbation identities and the predicted eps^5 coefficient");
  per->add_option("-C,--half-width", dp.C, "support half-width C");
  per->add_option("-m,--m", dp.m, "target dimension (>= 3)");
  per->add_option("--hierarchy-cells", hier_cells, "lattice cells per side for hierarchy residuals");
  per->add_option("--eps-list", eps_list, "eps values for the prediction table")->delimiter(',');

  auto* swe = app.add_subcommand("sweep-eps", "alpha - e1 against eps with Richardson extrapolation");
  swe->add_option("-C,--half-width", dp.C, "support half-width C");
  swe->add_option("--eps-list", eps_list, "eps values")->delimiter(',');
  swe->add_option("--cells", cells_list, "cells per half-width, coarse to fine (default 1024,2048)")->delimiter(',');
  swe->add_option("--t0", t0_factor, "extraction time in units of C (default 2)");
  swe->add_flag("--plot", plot, "also write an SVG plot");

  auto* swg = app.add_subcommand("sweep-growth", "critical norms against T from one evolution");
  add_data_options(swg, dp);
  swg->add_option("--cells", cells, "grid cells per half-width for the evolution");
  swg->add_option("--t0", t0_factor, "extraction time in units of C");
  swg->add_option("--T-min", t_min, "smallest T in units of C");
  swg->add_option("--T-max", t_max, "largest T in units of C");
  swg->add_option("--T-count", t_count, "number of log-spaced T values");
  swg->add_option("--dx-cells", dx_cells, "synthesis spacing C / dx-cells");
  swg->add_option("--kappa-low", window.kappa_low, "lower-bound window starts at kappa-low / T");
  swg->add_option("--kappa-high", window.kappa_high, "lower-bound window ends at kappa-high / C");
  swg->add_flag("--plot", plot, "also write SVG plots");

  auto* cnv = app.add_subcommand("convergence", "scheme error against the exact circle-target solution");
  cnv->add_option("-C,--half-width", dp.C, "support half-width C");
  cnv->add_option("--eps", dp.eps, "data amplitude");
  cnv->add_option("--cells", cells_list, "cells per half-width (default 256,512,1024)")->delimiter(',');
  cnv->add_option("--t-final", t0_factor, "final time in units of C (default 2)");

  auto* cas = app.add_subcommand("cascade", "disjoint rescaled copies evolved together");
  cas->add_option("-k,--k", k_scales, "number of scales (1 to 3)");
  cas->add_option("--eps", dp.eps, "amplitude of the largest copy");
  cas->add_option("-C,--half-width", dp.C, "half-width of the largest copy");
  cas->add_option("--cells", cells, "cells per C (default 512)");

  auto* hv = app.add_subcommand("demo-heaviside", "dyadic blocks of D^-1((Dh)^2)");
  hv->add_option("-C,--half-width", dp.C, "bump half-width");
  hv->add_option("--j-min", j_min, "lowest block");
  hv->add_option("--j-max", j_max, "highest block");
  hv->add_option("--fit-blocks", fit_blocks, "blocks in the partial-sum fit");

  // Per-subcommand defaults that differ from the shared variables.
  const auto first_sub = [&]() -> CLI::App* {
    for (const auto& a : args)
      for (auto* s : app.get_subcommands({}))
        if (s->get_name() == a) return s;
    return nullptr;
  };
  try {
    CLI::App* chosen = first_sub();
    if (chosen == swe) {
      t0_factor = 2.0;
      swe->get_option("--t0")->default_val(2.0);
    } else if (chosen == cnv) {
      dp.eps = 0.4;
      t0_factor = 2.0;
      cnv->get_option("--eps")->default_val(0.4);
      cnv->get_option("--t-final")->default_val(2.0);
    } else if (chosen == cas) {
      dp.eps = 0.4;
      cells = 512.0;
      cas->get_option("--eps")->default_val(0.4);
      cas->get_option("--cells")->default_val(512.0);
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
      if (!path.empty()) apply_config(app, chosen, read_config(path));
    }
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    Run run;
    run.out = resolve_output_dir(common.out);
    ensure_dir(run.out);
    const std::string name = sub->get_name();
    if (name == "gen-data") {
      dp.truncation = truncation;
      cmd_gen_data(run, dp, cells, extent);
    } else if (name == "evolve") {
      cmd_evolve(run, dp, cells, t_final, slice_times, scheme);
    } else if (name == "profile") {
      cmd_profile(run, dp, cells, t0_factor, slice_path);
    } else if (name == "norms") {
      cmd_norms(run, slice_paths, profile_path, T_list, dx_cells, window);
    } else if (name == "perturb") {
      cmd_perturb(run, dp, hier_cells, eps_list);
    } else if (name == "sweep-eps") {
      cmd_sweep_eps(run, dp.C, eps_list, cells_list.empty() ? std::vector<double>{1024.0, 2048.0} : cells_list,
                    t0_factor, common.jobs, plot);
    } else if (name == "sweep-growth") {
      cmd_sweep_growth(run, dp, cells, t0_factor, t_min, t_max, t_count, dx_cells, window, common.jobs, plot);
    } else if (name == "convergence") {
      cmd_convergence(run, dp, cells_list.empty() ? std::vector<double>{256.0, 512.0, 1024.0} : cells_list,
                      t0_factor, common.jobs);
    } else if (name == "cascade") {
      cmd_cascade(run, k_scales, dp.eps, dp.C, cells, common.jobs);
    } else if (name == "demo-heaviside") {
      cmd_heaviside(run, dp.C, j_min, j_max, fit_blocks);
    }
    write_manifest(run, app, *sub);
    return kExitOk;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const OutputError& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return kExitOutput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace wavemap::cli
