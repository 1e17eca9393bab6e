#include "ctmhd/timestepper.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ctmhd/fields.hpp"
#include "ctmhd/log.hpp"

namespace ctmhd {

SolverOptions SolverOptions::for_problem(const ProblemSetup& p) {
  SolverOptions o;
  o.cfl = p.cfl;
  o.t_final = p.t_final;
  o.ct25d_full = p.ct25d_full;
  o.limiter = p.limiter;
  o.positivity_floor = p.positivity_floor;
  return o;
}

std::vector<double> initial_fields(const ProblemSetup& p, const MappedGrid& grid) {
  const Extents& e = grid.extents();
  const std::size_t ncell = e.size();
  std::vector<double> q(kNumFields * ncell, 0.0);
  const auto rule = QuadratureRule::gauss(5);
  e.for_each(e.ghost(), [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k);
    double acc[kNumFields] = {};
    double vol = 0.0;
    for (const VolumeNode& node : grid.cell_quadrature(c, rule)) {
      const Primitive w = p.state(node.point);
      const State s = conserved_from_primitive(w);
      const Vec3 a = p.potential(node.point);
      const Vec3 u = p.velocity ? p.velocity(node.point) : w.u;
      for (int v = 0; v < kNumMhd; ++v) acc[v] += node.weight * s[v];
      for (int d = 0; d < 3; ++d) {
        acc[kVarA + d] += node.weight * a[d];
        acc[kVarU + d] += node.weight * u[d];
      }
      vol += node.weight;
    }
    for (int v = 0; v < kNumFields; ++v) q[v * ncell + c] = acc[v] / vol;
  });
  return q;
}

std::vector<double> exact_fields(const ProblemSetup& p, const MappedGrid& grid, double t) {
  if (!p.exact_state && !p.exact_potential)
    throw ConfigError("problem '" + p.name + "' has no exact solution");
  const Extents& e = grid.extents();
  const std::size_t ncell = e.size();
  std::vector<double> q(kNumFields * ncell, 0.0);
  const auto rule = QuadratureRule::gauss(5);
  e.for_each(0, [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k);
    double acc[kNumFields] = {};
    double vol = 0.0;
    for (const VolumeNode& node : grid.cell_quadrature(c, rule)) {
      if (p.exact_state) {
        const Primitive w = p.exact_state(node.point, t);
        const State s = conserved_from_primitive(w);
        for (int v = 0; v < kNumMhd; ++v) acc[v] += node.weight * s[v];
        for (int d = 0; d < 3; ++d) acc[kVarU + d] += node.weight * w.u[d];
      }
      if (p.exact_potential) {
        const Vec3 a = p.exact_potential(node.point, t);
        for (int d = 0; d < 3; ++d) acc[kVarA + d] += node.weight * a[d];
      }
      vol += node.weight;
    }
    for (int v = 0; v < kNumFields; ++v) q[v * ncell + c] = acc[v] / vol;
  });
  return q;
}

Simulation::Simulation(ProblemSetup problem, SolverOptions options)
    : problem_(std::move(problem)), opts_(std::move(options)) {
  if (!(opts_.cfl > 0.0)) throw ConfigError("cfl must be positive");
  if (!(opts_.t_final >= 0.0)) throw ConfigError("t_final must be non-negative");
  if (opts_.time_order != 1 && opts_.time_order != 3) throw ConfigError("time_order must be 1 or 3");
  if (!(opts_.positivity_floor >= 0.0 && opts_.positivity_floor < 1.0))
    throw ConfigError("positivity_floor must lie in [0, 1)");
  opts_.limiter.validate();

  grid_ = std::make_unique<MappedGrid>(problem_.grid);
  ReconstructionOptions ro;
  ro.limit = opts_.weno;
  rec_ = std::make_unique<Reconstructor>(*grid_, ro);
  if (rec_->max_stencil_stretch() > 10.0)
    log_warn_once("stencil-stretch", "reconstruction stencils are strongly stretched (edge ratio " +
                                         std::to_string(rec_->max_stencil_stretch()) +
                                         "); least-squares accuracy may degrade");
  mhd_ = std::make_unique<MhdOperator>(*grid_, *rec_);

  const int dim = grid_->dim();
  const bool advection = problem_.mode == ProblemMode::Advection;
  if (advection) {
    evolve_ = {false, false, true};
    correct_ = {false, false, false};
  } else if (dim == 1) {
    evolve_ = {false, true, true};
    correct_ = {false, true, true};
  } else if (dim == 2 && !opts_.ct25d_full) {
    evolve_ = {false, false, true};
    correct_ = {true, true, false};
  } else {
    evolve_ = {true, true, true};
    correct_ = {true, true, true};
  }
  if (!opts_.corrector) correct_ = {false, false, false};

  res_ = std::make_unique<Resistivity>(*grid_, *rec_, opts_.limiter);
  curl_ = std::make_unique<CurlOperator>(*grid_, *rec_);
  bnd_ = std::make_unique<BoundaryFiller>(grid_->extents(), problem_.bc);

  const std::size_t ncell = grid_->extents().size();
  q_ = initial_fields(problem_, *grid_);

  PotentialOptions po{opts_.potential_solver, evolve_};
  if (dim == 1 && !advection) {
    // B1 is not a derivative of A(x); it is uniform and stays so.
    const Extents& e = grid_->extents();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    e.for_each(0, [&](int i, int j, int k) {
      const double b = q_[kBx * ncell + e.index(i, j, k)];
      lo = std::min(lo, b);
      hi = std::max(hi, b);
    });
    if (hi - lo > 1e-10 * std::max(1.0, std::abs(hi)))
      throw ConfigError("1D runs need a uniform normal field B1");
    po.background = {0.5 * (lo + hi), 0.0, 0.0};
  }
  pot_ = std::make_unique<PotentialOperator>(*grid_, *rec_, po);
  bnd_->set_inflow_state(q_);
  fill_ghosts(q_, 0.0);
  bnd_->fill(q_.data(), kVarU, kVarU + 3);
  qn_.assign(q_.size(), 0.0);
  qs_.assign(q_.size(), 0.0);
  coeff_.assign(q_.size() * rec_->ncoeff(), 0.0);
  rhs_.assign((kVarA + 3) * ncell, 0.0);
  eps_.assign(ncell, 0.0);
  if (!advection) mhd_->check_admissible(q_.data());
}

Simulation::~Simulation() = default;

void Simulation::set_fields(std::vector<double> q) {
  if (q.size() != q_.size()) throw ConfigError("field block size mismatch");
  q_ = std::move(q);
  fill_ghosts(q_, t_);
}

void Simulation::fill_ghosts(std::vector<double>& q, double t) const { bnd_->fill(q.data(), 0, kVarA + 3, t); }

void Simulation::reconstruct(const std::vector<double>& q, int first, int last, bool limit) {
  const std::size_t ncell = grid_->extents().size();
  const int nc = rec_->ncoeff();
  for (int v = first; v < last; ++v)
    rec_->reconstruct(q.data() + v * ncell, coeff_.data() + v * nc, static_cast<std::size_t>(kNumFields) * nc, 1,
                      limit);
}

void Simulation::update_velocity(std::vector<double>& q) {
  if (problem_.mode == ProblemMode::Advection) return;
  reconstruct(q, kRho, kMz + 1, opts_.weno);
  const Extents& e = grid_->extents();
  const std::size_t ncell = e.size();
  const int nc = rec_->ncoeff();
  // Third-order cell averages of u = m / rho from the reconstructed polynomials.
  e.for_each(0, [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k);
    double phi[kMaxCoeffs];
    double acc[3] = {0.0, 0.0, 0.0}, vol = 0.0;
    bool ok = true;
    for (const VolumeNode& node : grid_->volume_nodes(c)) {
      rec_->basis(c, node.point, phi);
      double val[4];
      for (int v = 0; v < 4; ++v) {
        const double* cf = coeff_.data() + (c * kNumFields + v) * nc;
        double s = q[v * ncell + c];
        for (int m = 0; m < nc; ++m) s += cf[m] * phi[m];
        val[v] = s;
      }
      if (!(val[0] > 0.0)) {
        ok = false;
        break;
      }
      for (int d = 0; d < 3; ++d) acc[d] += node.weight * val[1 + d] / val[0];
      vol += node.weight;
    }
    for (int d = 0; d < 3; ++d)
      q[(kVarU + d) * ncell + c] = ok ? acc[d] / vol : q[(kMx + d) * ncell + c] / q[kRho * ncell + c];
  });
  bnd_->fill(q.data(), kVarU, kVarU + 3);
}

void Simulation::apply_corrector(std::vector<double>& q) {
  if (!(correct_[0] || correct_[1] || correct_[2])) return;
  const std::size_t ncell = grid_->extents().size();
  bnd_->fill(q.data(), kVarA, kVarA + 3, stage_time_);
  reconstruct(q, kVarA, kVarA + 3, opts_.limiter.enabled ? false : opts_.weno);
  curl_->apply(q.data(), coeff_.data(), correct_, q.data() + kBx * ncell);
}

void Simulation::stage(const std::vector<double>& qn, std::vector<double>& prev, StageCoefficients sc,
                       double dt, std::vector<double>& out) {
  const bool mhd = problem_.mode == ProblemMode::Mhd;
  const Extents& e = grid_->extents();
  const std::size_t ncell = e.size();

  if (mhd) update_velocity(prev);  // also leaves the MHD reconstruction in coeff_
  reconstruct(prev, kVarU, kVarU + 3, opts_.weno);
  const bool a_limit = opts_.limiter.enabled ? false : opts_.weno;
  for (int d = 0; d < 3; ++d)
    if (evolve_[d]) reconstruct(prev, kVarA + d, kVarA + d + 1, a_limit);

  if (mhd) {
    reconstruct(prev, kMz + 1, kNumMhd, opts_.weno);
    if (opts_.positivity_floor > 0.0)
      mhd_->limit_traces(prev.data(), coeff_.data(), kNumFields, opts_.positivity_floor);
    mhd_->apply(prev.data(), coeff_.data(), kNumFields, rhs_.data());
  }
  pot_->apply(prev.data(), coeff_.data(), dt, rhs_.data() + kVarA * ncell);
  limited_ = 0;
  if (opts_.limiter.enabled) {
    limited_ = res_->compute_epsilon(coeff_.data(), evolve_, dt, eps_.data());
    if (limited_ > 0) {
      bnd_->fill_scalar(eps_.data());
      res_->apply(coeff_.data(), evolve_, eps_.data(), rhs_.data() + kVarA * ncell);
    }
  }

  out = prev;
  const double a = sc.alpha, b = sc.beta * dt;
  auto update = [&](int v) {
    const double* q0 = qn.data() + v * ncell;
    const double* q1 = prev.data() + v * ncell;
    const double* r = rhs_.data() + v * ncell;
    double* o = out.data() + v * ncell;
    e.for_each(0, [&](int i, int j, int k) {
      const std::size_t c = e.index(i, j, k);
      o[c] = a * q0[c] + (1.0 - a) * q1[c] + b * r[c];
    });
  };
  if (mhd)
    for (int v = 0; v < kNumMhd; ++v) update(v);
  for (int d = 0; d < 3; ++d)
    if (evolve_[d]) update(kVarA + d);

  apply_corrector(out);
  fill_ghosts(out, stage_time_);
  if (mhd) mhd_->check_admissible(out.data());
}

void Simulation::step(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step must be positive and finite");
  qn_ = q_;
  int k = 0;
  try {
    if (opts_.time_order == 1) {
      ++k;
      stage_time_ = t_ + dt;
      stage(qn_, q_, {1.0, 1.0}, dt, qs_);
      std::swap(q_, qs_);
    } else {
      // Stage outputs approximate t + dt, t + dt/2 and t + dt.
      ++k;
      stage_time_ = t_ + dt;
      stage(qn_, q_, kSspRk3[0], dt, qs_);
      ++k;
      stage_time_ = t_ + 0.5 * dt;
      stage(qn_, qs_, kSspRk3[1], dt, q_);
      ++k;
      stage_time_ = t_ + dt;
      stage(qn_, q_, kSspRk3[2], dt, qs_);
      std::swap(q_, qs_);
    }
  } catch (const PositivityError& err) {
    q_ = qn_;
    std::string where;
    if (err.cell() != kNoCell) {
      const auto ijk = grid_->extents().ijk(err.cell());
      const Vec3 x = grid_->cell(err.cell()).centroid;
      where = " at cell (" + std::to_string(ijk[0]) + ", " + std::to_string(ijk[1]) + ", " +
              std::to_string(ijk[2]) + "), x = (" + std::to_string(x[0]) + ", " + std::to_string(x[1]) + ", " +
              std::to_string(x[2]) + ")";
    }
    throw PositivityError("step " + std::to_string(steps_ + 1) + ", stage " + std::to_string(k) +
                              ", t = " + std::to_string(t_) + where + ": " + err.what(),
                          err.cell());
  }
  t_ += dt;
  ++steps_;
  last_dt_ = dt;
}

double Simulation::compute_dt() const {
  double dt;
  if (problem_.mode == ProblemMode::Mhd) {
    dt = mhd_->stable_dt(q_.data(), opts_.cfl);
    if (dt >= 1e299) dt = std::numeric_limits<double>::infinity();
  } else {
    const Extents& e = grid_->extents();
    const std::size_t ncell = e.size();
    double m = std::numeric_limits<double>::infinity();
    e.for_each(0, [&](int i, int j, int k) {
      const std::size_t c = e.index(i, j, k);
      const Vec3 u{q_[kVarU * ncell + c], q_[(kVarU + 1) * ncell + c], q_[(kVarU + 2) * ncell + c]};
      const double s = norm(u);
      if (s > 0.0) m = std::min(m, grid_->cell(c).min_edge / s);
    });
    dt = opts_.cfl * m;
  }
  dt = std::min(dt, opts_.dt_max);
  if (!std::isfinite(dt)) throw ConfigError("all wave speeds vanish; set dt_max to bound the time step");
  return dt;
}

Diagnostics Simulation::advance(const std::function<void(const Diagnostics&)>& observer) {
  const double tol = 1e-12 * std::max(1.0, opts_.t_final);
  while (opts_.t_final - t_ > tol && steps_ < opts_.max_steps) {
    double dt = opts_.dt > 0.0 ? std::min(opts_.dt, opts_.dt_max) : compute_dt();
    if (t_ + dt > opts_.t_final - tol) dt = opts_.t_final - t_;
    step(dt);
    if (observer) observer(diagnostics());
  }
  return diagnostics();
}

Diagnostics Simulation::diagnostics() const {
  Diagnostics d;
  d.step = steps_;
  d.t = t_;
  d.dt = last_dt_;
  d.limited_cells = limited_;
  const Extents& e = grid_->extents();
  const std::size_t ncell = e.size();
  d.min_rho = d.min_p = std::numeric_limits<double>::infinity();
  e.for_each(0, [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k);
    const double v = grid_->cell(c).volume;
    State s;
    for (int n = 0; n < kNumMhd; ++n) s[n] = q_[n * ncell + c];
    d.mass += v * s[kRho];
    for (int n = 0; n < 3; ++n) d.momentum[n] += v * s[kMx + n];
    d.energy += v * s[kEnergy];
    d.min_rho = std::min(d.min_rho, s[kRho]);
    const double ke = 0.5 * (s[kMx] * s[kMx] + s[kMy] * s[kMy] + s[kMz] * s[kMz]) / s[kRho];
    const double me = 0.5 * (s[kBx] * s[kBx] + s[kBy] * s[kBy] + s[kBz] * s[kBz]);
    d.min_p = std::min(d.min_p, (kGamma - 1.0) * (s[kEnergy] - ke - me));
  });
  d.field = total_field(*grid_, q_.data() + kBx * ncell);
  d.div = divergence(*grid_, q_.data() + kBx * ncell);
  return d;
}

}  // namespace ctmhd
