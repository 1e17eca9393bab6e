#include "ctmhd/problems.hpp"

#include <cmath>

namespace ctmhd {

namespace {

// Circularly polarized Alfven wave of amplitude 0.1 on rho = 1, p = 0.1 and a
// unit background field along n. With u = dB it travels along -n at unit
// speed, so every field is a function of k (n.x + t).
struct AlfvenWave {
  Vec3 n, t1, t2;  // right-handed: t2 = n x t1
  double k = 2.0 * kPi;
  std::function<Vec3(const Vec3&)> a_background;  // curl = n

  Vec3 perturbation(const Vec3& x, double t) const {
    const double th = k * (dot(n, x) + t);
    return (0.1 * std::sin(th)) * t1 + (0.1 * std::cos(th)) * t2;
  }
  Primitive state(const Vec3& x, double t) const {
    const Vec3 d = perturbation(x, t);
    return Primitive{1.0, d, 0.1, n + d};
  }
  // curl(dB(k n.x) / k) = n x dB' = dB, and the Weyl-gauge A_t = u x B
  // reproduces the translation exactly.
  Vec3 potential(const Vec3& x, double t) const { return a_background(x) + (1.0 / k) * perturbation(x, t); }
};

void set_periodic_offsets(ProblemSetup& p) {
  const Vec3 x0 = p.grid.lo;
  const Vec3 a0 = p.potential(x0);
  for (int d = 0; d < p.grid.dim; ++d) {
    Vec3 x1 = x0;
    x1[d] = p.grid.hi[d];
    p.bc.a_offset[d] = p.potential(x1) - a0;
  }
}

int pick(int requested, int fallback) { return requested > 0 ? requested : fallback; }

ProblemSetup alfven25d(const ProblemParams& prm) {
  const double phi = alfven_angle(), c = std::cos(phi), s = std::sin(phi);
  AlfvenWave w;
  w.n = {c, s, 0.0};
  w.t1 = {-s, c, 0.0};
  w.t2 = {0.0, 0.0, 1.0};
  w.a_background = [c, s](const Vec3& x) { return Vec3{0.0, 0.0, -x[0] * s + x[1] * c}; };

  ProblemSetup p;
  p.name = "alfven2.5d";
  p.grid.dim = 2;
  p.grid.cells = {pick(prm.cells[0], 32), pick(prm.cells[1], 64), 1};
  p.grid.hi = {1.0 / c, 1.0 / s, 1.0};
  p.grid.kind = prm.grid.value_or(GridKind::Cartesian);
  p.grid.beta = prm.beta.value_or(p.grid.kind == GridKind::Cartesian ? 0.0 : 0.1);
  p.grid.L = 1.0 / c;
  p.grid.M = 1.0 / s;
  p.bc = BoundaryConditions::periodic();
  p.state = [w](const Vec3& x) { return w.state(x, 0.0); };
  p.potential = [w](const Vec3& x) { return w.potential(x, 0.0); };
  p.exact_state = [w](const Vec3& x, double t) { return w.state(x, t); };
  p.exact_potential = [w](const Vec3& x, double t) { return w.potential(x, t); };
  p.t_final = 1.0;
  p.cfl = 0.5;
  p.ct25d_full = true;
  set_periodic_offsets(p);
  return p;
}

ProblemSetup alfven3d(const ProblemParams& prm) {
  // Wave vector 2 pi (1, 1/2, 1/2): periodic on [0,1] x [0,2] x [0,2].
  AlfvenWave w;
  const Vec3 kv{1.0, 0.5, 0.5};
  w.k = 2.0 * kPi * norm(kv);
  w.n = (1.0 / norm(kv)) * kv;
  w.t1 = (1.0 / std::sqrt(5.0)) * Vec3{-1.0, 2.0, 0.0};
  w.t2 = cross(w.n, w.t1);
  const Vec3 n = w.n;
  w.a_background = [n](const Vec3& x) { return 0.5 * cross(n, x); };

  ProblemSetup p;
  p.name = "alfven3d";
  p.grid.dim = 3;
  p.grid.cells = {pick(prm.cells[0], 16), pick(prm.cells[1], 32), pick(prm.cells[2], 32)};
  p.grid.hi = {1.0, 2.0, 2.0};
  p.grid.kind = prm.grid.value_or(GridKind::Cartesian);
  p.grid.beta = prm.beta.value_or(0.0);
  p.grid.L = 1.0;
  p.grid.M = 2.0;
  p.bc = BoundaryConditions::periodic();
  p.state = [w](const Vec3& x) { return w.state(x, 0.0); };
  p.potential = [w](const Vec3& x) { return w.potential(x, 0.0); };
  p.exact_state = [w](const Vec3& x, double t) { return w.state(x, t); };
  p.exact_potential = [w](const Vec3& x, double t) { return w.potential(x, t); };
  p.t_final = 1.0;
  p.cfl = 0.6;
  set_periodic_offsets(p);
  return p;
}

Vec3 shock_tube_potential(const Vec3& x) {
  const Primitive w = x[0] < 0.0 ? shock_tube_left() : shock_tube_right();
  return {0.0, x[0] * w.B[2], x[1] * w.B[0] - x[0] * w.B[1]};
}

ProblemSetup shocktube(const ProblemParams& prm, int dim) {
  ProblemSetup p;
  p.name = dim == 1 ? "shocktube1d" : "shocktube";
  p.grid.dim = dim;
  p.grid.cells = {pick(prm.cells[0], dim == 1 ? 1000 : 200), dim == 1 ? 1 : pick(prm.cells[1], 200), 1};
  p.grid.lo = {-0.7, dim == 1 ? 0.0 : -0.7, 0.0};
  p.grid.hi = {0.7, dim == 1 ? 1.0 : 0.7, 1.0};
  p.grid.kind = prm.grid.value_or(dim == 1 ? GridKind::Cartesian : GridKind::ShockTubeBlend);
  p.grid.beta = prm.beta.value_or(0.0);
  p.grid.L = p.grid.M = 1.2;
  p.grid.blend_half_width = 0.6;
  p.bc = BoundaryConditions::outflow();
  p.state = [](const Vec3& x) { return x[0] < 0.0 ? shock_tube_left() : shock_tube_right(); };
  p.potential = shock_tube_potential;
  p.t_final = 0.2;
  p.cfl = 0.5;
  return p;
}

Primitive cloud_post_shock() {
  return Primitive{3.86859, {11.2536, 0.0, 0.0}, 167.345, {0.0, 2.1826182, -2.1826182}};
}
Primitive cloud_ambient() { return Primitive{1.0, {0.0, 0.0, 0.0}, 1.0, {0.0, 0.56418958, 0.56418958}}; }

ProblemSetup cloudshock(const ProblemParams& prm, int dim) {
  ProblemSetup p;
  p.name = dim == 3 ? "cloudshock3d" : "cloudshock2.5d";
  p.grid.dim = dim;
  const int n = dim == 3 ? 64 : 128;
  p.grid.cells = {pick(prm.cells[0], n), pick(prm.cells[1], n), dim == 3 ? pick(prm.cells[2], n) : 1};
  p.grid.kind = prm.grid.value_or(GridKind::Cartesian);
  p.grid.beta = prm.beta.value_or(0.0);
  p.grid.inclusion_center = {0.25, 0.5, 0.5};
  p.grid.inclusion_radius = 0.2;
  p.bc = BoundaryConditions::outflow();
  p.bc.kind[0][0] = BoundaryKind::Inflow;
  const Vec3 centre{0.25, 0.5, 0.5};
  p.state = [centre, dim](const Vec3& x) {
    if (x[0] < 0.05) return cloud_post_shock();
    Primitive w = cloud_ambient();
    Vec3 r = x - centre;
    if (dim < 3) r[2] = 0.0;
    if (dot(r, r) < 0.15 * 0.15) w.rho = 10.0;
    return w;
  };
  // Continuous gauge: both components tangential to the shock plane vanish on it.
  p.potential = [](const Vec3& x) {
    const Primitive w = x[0] < 0.05 ? cloud_post_shock() : cloud_ambient();
    const double s = x[0] - 0.05;
    return Vec3{0.0, w.B[2] * s, -w.B[1] * s};
  };
  p.t_final = 0.06;
  p.cfl = 0.5;
  p.ct25d_full = true;
  // Face traces at the Mach ~10 shock hitting the cloud need the safeguard.
  p.positivity_floor = 1e-3;
  return p;
}

double trapezoid(double x) {
  if (x <= 0.25 || x >= 0.75) return 0.0;
  if (x <= 0.4) return (x - 0.25) / 0.075;
  if (x <= 0.6) return 2.0;
  return (0.75 - x) / 0.075;
}

ProblemSetup advect1d(const ProblemParams& prm) {
  ProblemSetup p;
  p.name = "advect1d";
  p.mode = ProblemMode::Advection;
  p.grid.dim = 1;
  p.grid.cells = {pick(prm.cells[0], 200), 1, 1};
  p.grid.kind = prm.grid.value_or(GridKind::Cartesian);
  p.bc = BoundaryConditions::periodic();
  p.state = [](const Vec3&) { return Primitive{1.0, {1.0, 0.0, 0.0}, 1.0, {0.0, 0.0, 0.0}}; };
  p.velocity = [](const Vec3&) { return Vec3{1.0, 0.0, 0.0}; };
  p.potential = [](const Vec3& x) { return Vec3{0.0, 0.0, trapezoid(x[0])}; };
  p.exact_potential = [](const Vec3& x, double t) {
    const double s = x[0] - t;
    return Vec3{0.0, 0.0, trapezoid(s - std::floor(s))};
  };
  p.t_final = 1.0;
  p.cfl = 0.7;
  p.limiter.eta_mode = EtaMode::Advection;
  p.limiter.eta_scale = 0.2;
  set_periodic_offsets(p);
  return p;
}

}  // namespace

double alfven_angle() { return std::atan(0.5); }

Primitive shock_tube_left() {
  const double s = 1.0 / std::sqrt(4.0 * kPi);
  return Primitive{1.08, {1.2, 0.01, 0.5}, 0.95, {2.0 * s, 3.6 * s, 2.0 * s}};
}

Primitive shock_tube_right() {
  const double s = 1.0 / std::sqrt(4.0 * kPi);
  return Primitive{1.0, {0.0, 0.0, 0.0}, 1.0, {2.0 * s, 4.0 * s, 2.0 * s}};
}

std::vector<std::string> problem_names() {
  return {"alfven2.5d", "alfven3d", "shocktube", "shocktube1d", "cloudshock2.5d", "cloudshock3d", "advect1d"};
}

ProblemSetup make_problem(const std::string& name, const ProblemParams& params) {
  if (name == "alfven2.5d") return alfven25d(params);
  if (name == "alfven3d") return alfven3d(params);
  if (name == "shocktube") return shocktube(params, 2);
  if (name == "shocktube1d") return shocktube(params, 1);
  if (name == "cloudshock2.5d") return cloudshock(params, 2);
  if (name == "cloudshock3d") return cloudshock(params, 3);
  if (name == "advect1d") return advect1d(params);
  std::string known;
  for (const auto& n : problem_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown problem '" + name + "' (known: " + known + ")");
}

}  // namespace ctmhd
