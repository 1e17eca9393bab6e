#include <cmath>
#include <random>
#include <vector>

#include "ctmhd/potential.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace ctmhd;
using namespace ctmhd::test;

namespace {

Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  return {d(rng), d(rng), d(rng)};
}

Vec3 unit(Vec3 v) { return (1.0 / norm(v)) * v; }

double max_abs_diff(const Mat3& a, const Mat3& b) {
  double m = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
  return m;
}

bool is_zero(const Mat3& a, double tol) {
  return max_abs_diff(a, Mat3{}) <= tol;
}

constexpr double kTwoPi = 2.0 * kPi;

std::vector<double> rhs_of(const MappedGrid& g, const Reconstructor& r, const FieldBlock& b, double dt,
                           PotentialOptions opts = {}) {
  PotentialOperator op(g, r, opts);
  std::vector<double> rhs(3 * g.extents().size(), 0.0);
  op.apply(b.avg.data(), b.coeff.data(), dt, rhs.data());
  return rhs;
}

}  // namespace

TEST_CASE("coefficient matrices") {
  const Vec3 u{1.0, 0.0, 0.0};
  const Mat3 N1 = coefficient_matrix(0, u), N2 = coefficient_matrix(1, u), N3 = coefficient_matrix(2, u);
  Mat3 d1{};
  d1[1][1] = d1[2][2] = 1.0;
  CHECK(max_abs_diff(N1, d1) == 0.0);
  Mat3 e2{};
  e2[1][0] = -1.0;
  CHECK(max_abs_diff(N2, e2) == 0.0);
  Mat3 e3{};
  e3[2][0] = -1.0;
  CHECK(max_abs_diff(N3, e3) == 0.0);
  for (int d = 0; d < 3; ++d) CHECK(is_zero(coefficient_matrix(d, Vec3{0.0, 0.0, 0.0}), 0.0));

  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const Vec3 v = random_vec(rng), n = unit(random_vec(rng));
    Mat3 sum{};
    for (int d = 0; d < 3; ++d) {
      const Mat3 Nd = coefficient_matrix(d, v);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) sum[i][j] += n[d] * Nd[i][j];
    }
    CHECK(max_abs_diff(sum, directional_matrix(n, v)) < 1e-15);
  }
}

TEST_CASE("directional matrix spectrum and degenerate directions") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 1000; ++t) {
    const Vec3 u = random_vec(rng, 3.0), n = unit(random_vec(rng));
    const Mat3 M = directional_matrix(n, u);
    const double un = dot(n, u);
    // Characteristic polynomial of {0, un, un}: trace 2 un, principal minors un^2, det 0.
    const double tr = M[0][0] + M[1][1] + M[2][2];
    double minors = 0.0;
    for (int i = 0; i < 3; ++i) {
      const int a = (i + 1) % 3, b = (i + 2) % 3;
      minors += M[a][a] * M[b][b] - M[a][b] * M[b][a];
    }
    const Vec3 r0{M[0][0], M[0][1], M[0][2]}, r1{M[1][0], M[1][1], M[1][2]}, r2{M[2][0], M[2][1], M[2][2]};
    const double det = dot(r0, cross(r1, r2));
    const double s = 1.0 + norm(u) * norm(u);
    CHECK(std::abs(tr - 2.0 * un) < 1e-13 * s);
    CHECK(std::abs(minors - un * un) < 1e-13 * s);
    CHECK(std::abs(det) < 1e-13 * s * norm(u));
    // n spans the null space; every w orthogonal to u has eigenvalue un.
    CHECK(norm(matvec(M, n)) < 1e-14 * s);
    const Vec3 w = cross(u, n);
    CHECK(norm(matvec(M, w) - un * w) < 1e-13 * s * s);
  }

  // n perpendicular to u: every eigenvalue is zero but M != 0, so M is nilpotent
  // and has an incomplete eigenvector basis.
  const Mat3 P = directional_matrix(Vec3{0.0, 1.0, 0.0}, Vec3{1.0, 0.0, 0.0});
  CHECK_FALSE(is_zero(P, 0.0));
  CHECK(is_zero(matmul(P, P), 0.0));

  // n parallel to u: M = s (I - n n^T), minimal polynomial x (x - s), so the
  // eigenvectors are complete.
  const Vec3 n = unit(Vec3{1.0, 2.0, -0.5});
  const double s = 1.7;
  const Mat3 Q = directional_matrix(n, s * n);
  Mat3 Q2s = matmul(Q, Q);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) Q2s[i][j] -= s * Q[i][j];
  CHECK(is_zero(Q2s, 1e-14));
}

TEST_CASE("path matrix") {
  std::mt19937_64 rng(5);
  const Vec3 n = unit(Vec3{0.3, -0.4, 0.8});
  const Vec3 u = random_vec(rng);
  const PathMatrix same = path_matrix(u, u, n);
  CHECK(max_abs_diff(same.A, directional_matrix(n, u)) < 1e-15);
  CHECK(same.alpha == doctest::Approx(std::abs(dot(u, n))).epsilon(1e-15));

  const Vec3 ex{1.0, 0.0, 0.0};
  const PathMatrix half = path_matrix(ex, Vec3{0.0, 0.0, 0.0}, ex);
  Mat3 expect = directional_matrix(ex, ex);
  for (auto& row : expect)
    for (double& v : row) v *= 0.5;
  CHECK(max_abs_diff(half.A, expect) < 1e-16);
  CHECK(half.alpha == 1.0);

  CHECK(path_matrix(Vec3{0.0, 0.0, 0.0}, Vec3{0.0, 0.0, 0.0}, ex, 1e-7).alpha == 1e-7);
  for (int t = 0; t < 100; ++t) {
    const Vec3 um = random_vec(rng), up = random_vec(rng), nn = unit(random_vec(rng));
    const PathMatrix pm = path_matrix(um, up, nn);
    CHECK(pm.alpha >= std::abs(dot(um, nn)));
    CHECK(pm.alpha >= std::abs(dot(up, nn)));
  }
}

TEST_CASE("fluctuation sum identity for both solvers") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> pos(0.1, 2.0);
  double worst = 0.0;
  for (int t = 0; t < 20000; ++t) {
    const Vec3 um = random_vec(rng, 2.0), up = random_vec(rng, 2.0), n = unit(random_vec(rng));
    const Vec3 dA = random_vec(rng, 3.0);
    const PathMatrix pm = path_matrix(um, up, n, 1e-10);
    const Vec3 ref = matvec(pm.A, dA);
    const auto r = rusanov_fluctuations(dA, pm);
    const auto f = force_fluctuations(dA, pm, pos(rng), pos(rng));
    for (int i = 0; i < 3; ++i) {
      const double s = 1.0 + std::abs(ref[i]);
      worst = std::max(worst, std::abs(r.minus[i] + r.plus[i] - ref[i]) / s);
      worst = std::max(worst, std::abs(f.minus[i] + f.plus[i] - ref[i]) / s);
    }
  }
  CHECK(worst < 1e-13);

  const PathMatrix pm = path_matrix(Vec3{0.2, 0.1, 0.0}, Vec3{0.3, 0.0, 0.4}, Vec3{1.0, 0.0, 0.0});
  const Vec3 zero{0.0, 0.0, 0.0};
  for (const auto& f : {rusanov_fluctuations(zero, pm), force_fluctuations(zero, pm, 0.1, 0.05)})
    for (int i = 0; i < 3; ++i) {
      CHECK(f.minus[i] == 0.0);
      CHECK(f.plus[i] == 0.0);
    }
}

TEST_CASE("scalar fluctuation examples") {
  // A3 only, u.n = 1: the (3,3) entry of M(n, u) is u.n for n in the xy-plane.
  const Vec3 n{1.0, 0.0, 0.0}, u{1.0, 0.0, 0.0};
  const PathMatrix pm = path_matrix(u, u, n);
  CHECK(pm.A[2][2] == 1.0);
  CHECK(pm.alpha == 1.0);
  const auto r = rusanov_fluctuations(Vec3{0.0, 0.0, 2.0}, pm);
  CHECK(r.minus[2] == doctest::Approx(0.0));
  CHECK(r.plus[2] == doctest::Approx(2.0));

  const auto f = force_fluctuations(Vec3{0.0, 0.0, 1.0}, pm, 2.0, 1.0);
  CHECK(f.minus[2] == doctest::Approx(-1.0 / 8.0).epsilon(1e-15));
  CHECK(f.plus[2] == doctest::Approx(9.0 / 8.0).epsilon(1e-15));
  CHECK(f.minus[2] + f.plus[2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("FORCE keeps dissipation in the nilpotent direction") {
  const PathMatrix pm = path_matrix(Vec3{1.0, 0.0, 0.0}, Vec3{1.0, 0.0, 0.0}, Vec3{0.0, 1.0, 0.0});
  CHECK(is_zero(matmul(pm.A, pm.A), 0.0));
  const Vec3 dA{0.3, -0.7, 1.1};
  const double dx = 0.1, dt = 0.05;
  const auto f = force_fluctuations(dA, pm, dx, dt);
  const Vec3 Ad = matvec(pm.A, dA);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::isfinite(f.minus[i]));
    CHECK(std::isfinite(f.plus[i]));
    // With A^2 = 0 the only dissipation is the (dx/dt) I term.
    CHECK(f.plus[i] - f.minus[i] == doctest::Approx(0.5 * dx / dt * dA[i]).epsilon(1e-14));
    CHECK(f.plus[i] + f.minus[i] == doctest::Approx(Ad[i]).epsilon(1e-14));
  }
}

TEST_CASE("constant potential and zero velocity give no update") {
  GridDescriptor d = box({10, 12, 1}, 2);
  d.kind = GridKind::Colella;
  d.beta = 0.08;
  MappedGrid g(d);
  Reconstructor r(g);
  const std::size_t n = g.extents().size();

  const std::array<Field, 3> u{[](const Vec3& x) { return std::sin(kTwoPi * x[0]) + 0.3; },
                               [](const Vec3& x) { return std::cos(kTwoPi * x[1]); }, constant(-0.4)};
  const auto b1 = potential_block(g, r, {constant(1.5), constant(-2.0), constant(0.25)}, u);
  for (auto solver : {PotentialSolver::Rusanov, PotentialSolver::Force}) {
    const auto rhs = rhs_of(g, r, b1, 0.01, {solver, {true, true, true}});
    double m = 0.0;
    for (double v : rhs) m = std::max(m, std::abs(v));
    CHECK(m < 1e-13);
  }

  const std::array<Field, 3> A{[](const Vec3& x) { return std::sin(kTwoPi * x[0] * x[1]); },
                               [](const Vec3& x) { return x[0] * x[0] - x[1]; },
                               [](const Vec3& x) { return x[0] < 0.5 ? 1.0 : -1.0; }};
  const auto b2 = potential_block(g, r, A, {constant(0.0), constant(0.0), constant(0.0)});
  const double dt = 0.01;
  const auto rhs = rhs_of(g, r, b2, dt);
  // Only the positivity floor 1e-10 ds/dt of the local speed bound remains.
  double m = 0.0;
  g.extents().for_each(0, [&](int i, int j, int k) {
    const std::size_t c = g.extents().index(i, j, k);
    for (int a = 0; a < 3; ++a) m = std::max(m, std::abs(rhs[a * n + c]));
  });
  CHECK(m < 1e-8 / dt);
}

TEST_CASE("constant velocity and linear potential give the exact pointwise operator") {
  for (int dim : {2, 3}) {
    GridDescriptor d = box({6, 7, 5}, dim);
    if (dim == 2) {
      d.kind = GridKind::Colella;
      d.beta = 0.06;
    }
    MappedGrid g(d);
    Reconstructor r(g);
    const Vec3 u0{0.7, -0.3, dim == 3 ? 0.45 : 0.2};
    // grad[a] = dA_a / dx
    const std::array<Vec3, 3> grad{Vec3{0.5, -1.0, dim == 3 ? 0.3 : 0.0}, Vec3{2.0, 0.25, dim == 3 ? -0.6 : 0.0},
                                   Vec3{-0.75, 1.5, dim == 3 ? 0.9 : 0.0}};
    std::array<Field, 3> A;
    for (int a = 0; a < 3; ++a) A[a] = [gr = grad[a], a](const Vec3& x) { return 0.1 * a + dot(gr, x); };
    const auto b = potential_block(g, r, A, {constant(u0[0]), constant(u0[1]), constant(u0[2])});
    for (auto solver : {PotentialSolver::Rusanov, PotentialSolver::Force}) {
      const auto rhs = rhs_of(g, r, b, 0.02, {solver, {true, true, true}});
      const std::size_t n = g.extents().size();
      double err = 0.0;
      g.extents().for_each(0, [&](int i, int j, int k) {
        const std::size_t c = g.extents().index(i, j, k);
        for (int a = 0; a < 3; ++a) {
          double exact = 0.0;
          for (int dd = 0; dd < 3; ++dd) exact -= u0[dd] * grad[a][dd] - u0[dd] * grad[dd][a];
          err = std::max(err, std::abs(rhs[a * n + c] - exact));
        }
      });
      CHECK(err < 1e-11);
    }
  }
}

TEST_CASE("2.5D scalar path matches an independent upwind advection scheme") {
  MappedGrid g(box({16, 16, 1}, 2));
  Reconstructor r(g);
  const std::size_t n = g.extents().size();
  const int nc = r.ncoeff();
  const Field A3 = [](const Vec3& x) { return std::sin(kTwoPi * x[0]) * std::cos(kTwoPi * x[1]) + x[0] * x[1]; };
  const auto b = potential_block(g, r, {constant(0.0), constant(0.0), A3}, {constant(1.0), constant(0.0), constant(0.0)});
  const double dt = 1.0 / 16;
  const auto rhs = rhs_of(g, r, b, dt, {PotentialSolver::Rusanov, {false, false, true}});

  // Upwind flux difference of A3 with unit speed along x: the face value is the
  // left cell's trace, integrated over the face with Gauss points.
  const auto& e = g.extents();
  const auto rule = QuadratureRule::gauss(2);
  const double h = 1.0 / 16;
  auto trace = [&](std::size_t c, double x, double y) {
    return r.evaluate(c, b.avg[(kVarA + 2) * n + c], &b.coeff[(c * kNumFields + kVarA + 2) * nc], Vec3{x, y, 0.0});
  };
  double err = 0.0;
  e.for_each(0, [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k), w = c - e.stride(0);
    const double xr = (i - e.lo(0) + 1) * h, xl = xr - h, y0 = (j - e.lo(1)) * h;
    double flux = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double y = y0 + rule.nodes[q] * h;
      flux += rule.weights[q] * h * (trace(c, xr, y) - trace(w, xl, y));
    }
    const double oracle = -flux / (h * h);
    err = std::max(err, std::abs(rhs[2 * n + c] - oracle));
    CHECK(rhs[0 * n + c] == 0.0);
    CHECK(rhs[1 * n + c] == 0.0);
  });
  CHECK(err < 1e-10);
}

TEST_CASE("potential operator converges at third order for smooth advection") {
  const Field A3 = [](const Vec3& x) { return std::sin(kTwoPi * x[0]) * std::cos(kTwoPi * x[1]); };
  const Field dA3 = [](const Vec3& x) {
    return -kTwoPi * std::cos(kTwoPi * x[0]) * std::cos(kTwoPi * x[1]);
  };
  std::vector<double> errs;
  for (int m : {16, 32, 64}) {
    GridDescriptor d = box({m, m, 1}, 2);
    d.kind = GridKind::Colella;
    d.beta = 0.05;
    MappedGrid g(d);
    Reconstructor r(g);
    const auto b = potential_block(g, r, {constant(0.0), constant(0.0), A3},
                                   {constant(1.0), constant(0.0), constant(0.0)});
    const auto rhs = rhs_of(g, r, b, 0.5 / m, {PotentialSolver::Rusanov, {false, false, true}});
    const auto exact = averages(g, dA3);
    const std::size_t n = g.extents().size();
    double e1 = 0.0;
    g.extents().for_each(0, [&](int i, int j, int k) {
      const std::size_t c = g.extents().index(i, j, k);
      e1 += g.cell(c).volume * std::abs(rhs[2 * n + c] - exact[c]);
    });
    errs.push_back(e1);
  }
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double eoc = std::log2(errs[i - 1] / errs[i]);
    MESSAGE("potential EOC " << eoc);
    CHECK(eoc > 2.6);
  }
}

TEST_CASE("identity mapping through the general path matches the Cartesian path") {
  GridDescriptor cart = box({12, 10, 1}, 2);
  GridDescriptor ident = cart;
  ident.kind = GridKind::Custom;
  ident.mapping = [](const Vec3& x) { return x; };
  MappedGrid gc(cart), gi(ident);
  REQUIRE(gc.is_uniform_cartesian());
  REQUIRE_FALSE(gi.is_uniform_cartesian());
  Reconstructor rc(gc), ri(gi);
  const std::array<Field, 3> A{[](const Vec3& x) { return std::cos(kTwoPi * (x[0] + 2 * x[1])); },
                               [](const Vec3& x) { return x[0] > 0.4 ? 1.0 : 0.0; },
                               [](const Vec3& x) { return std::sin(kTwoPi * x[0]) * x[1]; }};
  const std::array<Field, 3> u{[](const Vec3& x) { return 0.5 + 0.3 * std::sin(kTwoPi * x[1]); },
                               [](const Vec3& x) { return -0.2 + x[0]; }, constant(0.1)};
  for (auto solver : {PotentialSolver::Rusanov, PotentialSolver::Force}) {
    const PotentialOptions opts{solver, {true, true, true}};
    const auto a = rhs_of(gc, rc, potential_block(gc, rc, A, u), 0.03, opts);
    const auto b = rhs_of(gi, ri, potential_block(gi, ri, A, u), 0.03, opts);
    double m = 0.0, s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      m = std::max(m, std::abs(a[i] - b[i]));
      s = std::max(s, std::abs(a[i]));
    }
    CHECK(m <= 1e-13 * s);
  }
}

TEST_CASE("aligned and perpendicular velocities stay finite") {
  GridDescriptor d = box({8, 8, 1}, 2);
  d.kind = GridKind::Colella;
  d.beta = 0.1;
  MappedGrid g(d);
  Reconstructor r(g);
  const std::array<Field, 3> A{[](const Vec3& x) { return x[0] < 0.5 ? 0.0 : 1.0; },
                               [](const Vec3& x) { return std::sin(kTwoPi * x[1]); },
                               [](const Vec3& x) { return std::abs(x[0] - 0.5) + x[1]; }};
  for (const Vec3 u : {Vec3{1.0, 0.0, 0.0}, Vec3{0.0, -1.0, 0.0}, Vec3{0.0, 0.0, 1.0}}) {
    const auto b = potential_block(g, r, A, {constant(u[0]), constant(u[1]), constant(u[2])});
    for (auto solver : {PotentialSolver::Rusanov, PotentialSolver::Force}) {
      const auto rhs = rhs_of(g, r, b, 0.05, {solver, {true, true, true}});
      for (double v : rhs) CHECK(std::isfinite(v));
    }
  }
}

TEST_CASE("potential solver names") {
  CHECK(parse_potential_solver("rusanov") == PotentialSolver::Rusanov);
  CHECK(parse_potential_solver("force") == PotentialSolver::Force);
  CHECK_THROWS_AS(parse_potential_solver("roe"), ConfigError);
}

TEST_CASE("a background field adds u x B0 to the potential update") {
  // 1D: A = (0, 0.4 x, -0.7 x) carries B2 = 0.7, B3 = 0.4 and B1 = 0.9 is a
  // background. With uniform u the exact rate is A_t = u x B.
  MappedGrid g(box({10, 1, 1}, 1));
  Reconstructor r(g, ReconstructionOptions{.limit = false});
  const Vec3 u{0.3, -0.2, 0.5}, B{0.9, 0.7, 0.4};
  const auto b = potential_block(g, r,
                                 {constant(0.0), [](const Vec3& x) { return 0.4 * x[0]; },
                                  [](const Vec3& x) { return -0.7 * x[0]; }},
                                 {constant(u[0]), constant(u[1]), constant(u[2])});
  PotentialOptions opts;
  opts.evolve = {false, true, true};
  opts.background = {B[0], 0.0, 0.0};
  const auto rhs = rhs_of(g, r, b, 0.01, opts);
  const Vec3 want = cross(u, B);
  const auto& e = g.extents();
  const std::size_t n = e.size();
  e.for_each(0, [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k);
    CHECK(rhs[c] == 0.0);
    CHECK(rhs[n + c] == doctest::Approx(want[1]).epsilon(1e-12));
    CHECK(rhs[2 * n + c] == doctest::Approx(want[2]).epsilon(1e-12));
  });
}
