#include "ctmhd/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctmhd/fields.hpp"
#include "ctmhd/log.hpp"

namespace ctmhd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.precision(12);
  return out;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(where + ": empty key or value");
    if (cfg.has(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::string Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

double Config::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
}

long Config::get_long(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key);
  try {
    std::size_t used = 0;
    const long n = std::stol(v, &used);
    if (used == v.size()) return n;
  } catch (const std::exception&) {
  }
  throw ConfigError("config key '" + key + "': '" + v + "' is not an integer");
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key);
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw ConfigError("config key '" + key + "': '" + v + "' is not a boolean");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "problem", "nx", "ny", "nz", "grid", "beta", "cfl", "t_final", "max_steps", "dt", "dt_max", "corrector",
      "ct25d_full", "weno", "potential_solver", "time_order", "positivity_floor", "limiter", "limiter.lambda_self",
      "limiter.lambda_nbr", "limiter.e", "limiter.eta_mode", "limiter.eta_scale", "output_dir", "output_every",
      "output_format", "levels", "reference_cells", "log_level"};
  return keys;
}

RunSpec run_spec(const Config& cfg) {
  for (const auto& [key, value] : cfg.entries())
    if (std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end())
      throw ConfigError("unknown config key '" + key + "'");

  if (cfg.has("log_level")) {
    const std::string l = cfg.get("log_level");
    if (l == "quiet") set_log_level(LogLevel::Quiet);
    else if (l == "warn") set_log_level(LogLevel::Warn);
    else if (l == "info") set_log_level(LogLevel::Info);
    else throw ConfigError("log_level must be quiet, warn or info");
  }

  ProblemParams prm;
  const char* dims[3] = {"nx", "ny", "nz"};
  for (int d = 0; d < 3; ++d) {
    const long n = cfg.get_long(dims[d], 0);
    if (n < 0 || n > 1 << 20) throw ConfigError(std::string("config key '") + dims[d] + "' out of range");
    prm.cells[d] = static_cast<int>(n);
  }
  if (cfg.has("grid")) prm.grid = parse_grid_kind(cfg.get("grid"));
  if (cfg.has("beta")) prm.beta = cfg.get_double("beta", 0.0);

  RunSpec spec;
  spec.problem = make_problem(cfg.get("problem"), prm);
  SolverOptions& o = spec.options;
  o = SolverOptions::for_problem(spec.problem);
  o.cfl = cfg.get_double("cfl", o.cfl);
  o.t_final = cfg.get_double("t_final", o.t_final);
  o.max_steps = cfg.get_long("max_steps", o.max_steps);
  o.dt = cfg.get_double("dt", o.dt);
  o.dt_max = cfg.get_double("dt_max", o.dt_max);
  o.corrector = cfg.get_bool("corrector", o.corrector);
  o.ct25d_full = cfg.get_bool("ct25d_full", o.ct25d_full);
  o.weno = cfg.get_bool("weno", o.weno);
  if (cfg.has("potential_solver")) o.potential_solver = parse_potential_solver(cfg.get("potential_solver"));
  o.time_order = static_cast<int>(cfg.get_long("time_order", o.time_order));
  o.positivity_floor = cfg.get_double("positivity_floor", o.positivity_floor);
  LimiterParams& l = o.limiter;
  l.enabled = cfg.get_bool("limiter", l.enabled);
  l.lambda_self = cfg.get_double("limiter.lambda_self", l.lambda_self);
  l.lambda_nbr = cfg.get_double("limiter.lambda_nbr", l.lambda_nbr);
  l.e = cfg.get_double("limiter.e", l.e);
  if (cfg.has("limiter.eta_mode")) l.eta_mode = parse_eta_mode(cfg.get("limiter.eta_mode"));
  l.eta_scale = cfg.get_double("limiter.eta_scale", l.eta_scale);
  l.validate();

  spec.output_dir = cfg.get("output_dir", "");
  spec.output_every = cfg.get_long("output_every", 0);
  if (spec.output_every < 0) throw ConfigError("output_every must be non-negative");
  if (cfg.has("output_format")) {
    spec.formats.clear();
    std::stringstream ss(cfg.get("output_format"));
    std::string f;
    while (std::getline(ss, f, ',')) {
      f = trim(f);
      if (f != "csv" && f != "vtk" && f != "curves") throw ConfigError("unknown output format '" + f + "'");
      spec.formats.push_back(f);
    }
  }
  spec.levels = static_cast<int>(cfg.get_long("levels", spec.levels));
  if (spec.levels < 2) throw ConfigError("levels must be at least 2");
  spec.reference_cells = static_cast<int>(cfg.get_long("reference_cells", spec.reference_cells));
  if (spec.reference_cells < 2) throw ConfigError("reference_cells must be at least 2");
  return spec;
}

const std::array<std::string, kNumErrorFields>& error_labels() {
  static const std::array<std::string, kNumErrorFields> labels = {"rho", "rho u1", "rho u2", "rho u3", "E", "B1",
                                                                  "B2",  "B3",     "A1",     "A2",     "A3"};
  return labels;
}

ErrorRow l1_errors(const MappedGrid& grid, const std::vector<double>& q, const std::vector<double>& exact) {
  const Extents& e = grid.extents();
  const std::size_t ncell = e.size();
  if (q.size() != kNumFields * ncell || exact.size() != q.size())
    throw ConfigError("error measurement: field block does not match the grid");
  ErrorRow err{};
  double vol = 0.0;
  e.for_each(0, [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k);
    const double v = grid.cell(c).volume;
    vol += v;
    for (int n = 0; n < kNumErrorFields; ++n) err[n] += v * std::abs(q[n * ncell + c] - exact[n * ncell + c]);
  });
  for (double& x : err) x /= vol;
  return err;
}

double eoc(double coarse, double fine) { return std::log2(coarse / fine); }

std::vector<ErrorRow> ConvergenceReport::eocs() const {
  std::vector<ErrorRow> out;
  for (std::size_t l = 1; l < errors.size(); ++l) {
    ErrorRow r{};
    for (int n = 0; n < kNumErrorFields; ++n) r[n] = eoc(errors[l - 1][n], errors[l][n]);
    out.push_back(r);
  }
  return out;
}

std::string ConvergenceReport::table() const {
  std::string s = fmt::format("{:<14}", "grid");
  for (const auto& l : error_labels()) s += fmt::format(" {:>10}", l);
  s += '\n';
  for (std::size_t l = 0; l < errors.size(); ++l) {
    s += fmt::format("{:<14}", grids[l]);
    for (double x : errors[l]) s += fmt::format(" {:>10.3e}", x);
    s += '\n';
  }
  const auto rates = eocs();
  for (std::size_t l = 0; l < rates.size(); ++l) {
    s += fmt::format("{:<14}", "EOC " + std::to_string(l + 1) + "-" + std::to_string(l + 2));
    for (double x : rates[l]) s += fmt::format(" {:>10.2f}", x);
    s += '\n';
  }
  return s;
}

ConvergenceReport run_convergence(const RunSpec& base, int levels,
                                  const std::function<void(const std::string&)>& progress) {
  if (!base.problem.exact_state && !base.problem.exact_potential)
    throw ConfigError("problem '" + base.problem.name + "' has no exact solution for a convergence study");
  ConvergenceReport rep;
  for (int l = 0; l < levels; ++l) {
    ProblemSetup p = base.problem;
    std::string label;
    for (int d = 0; d < p.grid.dim; ++d) {
      p.grid.cells[d] = base.problem.grid.cells[d] << l;
      label += (d ? "x" : "") + std::to_string(p.grid.cells[d]);
    }
    Simulation sim(p, base.options);
    sim.advance();
    rep.grids.push_back(label);
    rep.errors.push_back(l1_errors(sim.grid(), sim.fields(), exact_fields(p, sim.grid(), sim.time())));
    if (progress) progress(fmt::format("{}: {} steps, rho error {:.3e}", label, sim.steps(), rep.errors.back()[0]));
  }
  return rep;
}

double Profile::sample(const std::vector<double>& column, double x0) const {
  if (x.empty()) throw ConfigError("empty profile");
  if (x0 <= x.front()) return column.front();
  if (x0 >= x.back()) return column.back();
  const auto it = std::upper_bound(x.begin(), x.end(), x0);
  const std::size_t i = static_cast<std::size_t>(it - x.begin());
  const double t = (x0 - x[i - 1]) / (x[i] - x[i - 1]);
  return (1.0 - t) * column[i - 1] + t * column[i];
}

Profile profile_of(const Simulation& sim) {
  const MappedGrid& g = sim.grid();
  const Extents& e = g.extents();
  const std::size_t ncell = e.size();
  const auto& q = sim.fields();
  Profile p;
  e.for_each(0, [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k);
    State s;
    for (int v = 0; v < kNumMhd; ++v) s[v] = q[v * ncell + c];
    const Primitive w = primitive_from_conserved(s, c);
    p.x.push_back(g.cell(c).centroid[0]);
    p.rho.push_back(w.rho);
    p.p.push_back(w.p);
    p.b1.push_back(w.B[0]);
    p.b2.push_back(w.B[1]);
    p.b3.push_back(w.B[2]);
  });
  return p;
}

Profile reference_profile(int cells, const SolverOptions* options) {
  ProblemParams prm;
  prm.cells = {cells, 0, 0};
  const ProblemSetup p = make_problem("shocktube1d", prm);
  Simulation sim(p, options ? *options : SolverOptions::for_problem(p));
  sim.advance();
  return profile_of(sim);
}

double b1_error_vs_reference(const Simulation& sim, const Profile& ref) {
  const MappedGrid& g = sim.grid();
  const Extents& e = g.extents();
  const std::size_t ncell = e.size();
  double err = 0.0, vol = 0.0;
  e.for_each(0, [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k);
    const double v = g.cell(c).volume;
    err += v * std::abs(sim.fields()[kBx * ncell + c] - ref.sample(ref.b1, g.cell(c).centroid[0]));
    vol += v;
  });
  return err / vol;
}

std::vector<double> trace_derivative(const Simulation& sim, int component) {
  const MappedGrid& g = sim.grid();
  if (g.dim() != 1) throw ConfigError("trace derivative is defined for 1D runs");
  const Extents& e = g.extents();
  const std::size_t ncell = e.size();
  const SolverOptions& o = sim.options();
  // Same reconstruction the solver applies to the potential.
  const bool limit = o.limiter.enabled ? false : o.weno;
  const Reconstructor& rec = sim.reconstructor();
  const int nc = rec.ncoeff();
  const double* q = sim.fields().data() + (kVarA + component) * ncell;
  std::vector<double> coeff(ncell * nc, 0.0);
  rec.reconstruct(q, coeff.data(), nc, 1, limit);

  std::vector<double> face(e.cells(0) + 1);
  for (int i = e.lo(0); i <= e.hi(0); ++i) {
    const std::size_t cu = e.index(i, e.lo(1), e.lo(2)), cl = cu - 1;
    const Vec3 x = g.face(0, i, e.lo(1), e.lo(2)).nodes[0].point;
    face[i - e.lo(0)] = 0.5 * (rec.evaluate(cl, q[cl], coeff.data() + cl * nc, x) +
                               rec.evaluate(cu, q[cu], coeff.data() + cu * nc, x));
  }
  std::vector<double> d(e.cells(0));
  for (int i = 0; i < e.cells(0); ++i) {
    const int ii = e.lo(0) + i;
    const double dx = g.vertex(ii + 1, e.lo(1), e.lo(2))[0] - g.vertex(ii, e.lo(1), e.lo(2))[0];
    d[i] = (face[i + 1] - face[i]) / dx;
  }
  return d;
}

void write_csv(const Simulation& sim, const std::string& path) {
  const MappedGrid& g = sim.grid();
  const Extents& e = g.extents();
  const std::size_t ncell = e.size();
  const bool three = g.dim() == 3;
  auto out = open_output(path);
  out << (three ? "i,j,k,x,y,z" : "i,j,x,y") << ",rho,ux,uy,uz,E,Bx,By,Bz,p,A1,A2,A3\n";
  const auto& q = sim.fields();
  e.for_each(0, [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k);
    State s;
    for (int v = 0; v < kNumMhd; ++v) s[v] = q[v * ncell + c];
    const Primitive w = primitive_from_conserved(s, c);
    const Vec3& x = g.cell(c).centroid;
    out << i - e.lo(0) << ',' << j - e.lo(1) << ',';
    if (three) out << k - e.lo(2) << ',';
    out << x[0] << ',' << x[1] << ',';
    if (three) out << x[2] << ',';
    out << w.rho << ',' << w.u[0] << ',' << w.u[1] << ',' << w.u[2] << ',' << s[kEnergy] << ',' << w.B[0] << ','
        << w.B[1] << ',' << w.B[2] << ',' << w.p << ',' << q[kVarA * ncell + c] << ','
        << q[(kVarA + 1) * ncell + c] << ',' << q[(kVarA + 2) * ncell + c] << '\n';
  });
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void write_vtk(const Simulation& sim, const std::string& path) {
  const MappedGrid& g = sim.grid();
  const Extents& e = g.extents();
  const std::size_t ncell = e.size();
  const int dim = g.dim();
  int np[3];
  for (int d = 0; d < 3; ++d) np[d] = d < dim ? e.cells(d) + 1 : 1;
  auto out = open_output(path);
  out << "# vtk DataFile Version 3.0\n" << sim.problem().name << " t=" << sim.time() << "\nASCII\n";
  out << "DATASET STRUCTURED_GRID\nDIMENSIONS " << np[0] << ' ' << np[1] << ' ' << np[2] << '\n';
  out << "POINTS " << np[0] * np[1] * np[2] << " double\n";
  for (int k = 0; k < np[2]; ++k)
    for (int j = 0; j < np[1]; ++j)
      for (int i = 0; i < np[0]; ++i) {
        const Vec3& v = g.vertex(e.lo(0) + i, e.lo(1) + j, e.lo(2) + k);
        out << v[0] << ' ' << (dim > 1 ? v[1] : 0.0) << ' ' << (dim > 2 ? v[2] : 0.0) << '\n';
      }
  const auto& q = sim.fields();
  std::vector<Primitive> w;
  std::vector<std::size_t> cells;
  e.for_each(0, [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k);
    State s;
    for (int v = 0; v < kNumMhd; ++v) s[v] = q[v * ncell + c];
    w.push_back(primitive_from_conserved(s, c));
    cells.push_back(c);
  });
  out << "CELL_DATA " << cells.size() << '\n';
  auto scalar = [&](const char* name, auto&& f) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t n = 0; n < cells.size(); ++n) out << f(n) << '\n';
  };
  auto vector = [&](const char* name, auto&& f) {
    out << "VECTORS " << name << " double\n";
    for (std::size_t n = 0; n < cells.size(); ++n) {
      const Vec3 v = f(n);
      out << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    }
  };
  scalar("rho", [&](std::size_t n) { return w[n].rho; });
  scalar("p", [&](std::size_t n) { return w[n].p; });
  scalar("E", [&](std::size_t n) { return q[kEnergy * ncell + cells[n]]; });
  vector("u", [&](std::size_t n) { return w[n].u; });
  vector("B", [&](std::size_t n) { return w[n].B; });
  vector("A", [&](std::size_t n) {
    const std::size_t c = cells[n];
    return Vec3{q[kVarA * ncell + c], q[(kVarA + 1) * ncell + c], q[(kVarA + 2) * ncell + c]};
  });
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

void write_curves(const Simulation& sim, const std::string& prefix) {
  const Profile p = profile_of(sim);
  const std::pair<const char*, const std::vector<double>*> cols[] = {
      {"rho", &p.rho}, {"p", &p.p}, {"B1", &p.b1}, {"B2", &p.b2}, {"B3", &p.b3}};
  for (const auto& [name, col] : cols) {
    const std::string path = prefix + "_" + name + ".dat";
    auto out = open_output(path);
    out << "# x " << name << '\n';
    for (std::size_t n = 0; n < p.x.size(); ++n) out << p.x[n] << ' ' << (*col)[n] << '\n';
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
  }
}

void write_snapshot(const Simulation& sim, const std::string& dir, const std::string& stem,
                    const std::vector<std::string>& formats) {
  std::filesystem::create_directories(dir);
  const std::string base = (std::filesystem::path(dir) / stem).string();
  for (const auto& f : formats) {
    if (f == "csv") write_csv(sim, base + ".csv");
    else if (f == "vtk") write_vtk(sim, base + ".vtk");
    else if (f == "curves") write_curves(sim, base);
  }
}

}  // namespace ctmhd
