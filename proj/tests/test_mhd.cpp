#include <cmath>
#include <random>

#include "ctmhd/mhd.hpp"
#include "doctest.h"

using namespace ctmhd;

namespace {

struct RandomStates {
  std::mt19937_64 gen{12345};
  std::uniform_real_distribution<double> u01{0.0, 1.0};

  double uniform(double a, double b) { return a + (b - a) * u01(gen); }
  Vec3 vec(double s) { return {uniform(-s, s), uniform(-s, s), uniform(-s, s)}; }
  Vec3 direction() {
    Vec3 v;
    do v = vec(1.0);
    while (norm(v) < 0.1 || norm(v) > 1.0);
    return (1.0 / norm(v)) * v;
  }
  Primitive state() {
    Primitive w;
    w.rho = std::exp(uniform(std::log(0.1), std::log(10.0)));
    w.p = std::exp(uniform(std::log(0.1), std::log(10.0)));
    w.u = vec(2.0);
    w.B = vec(3.0);
    return w;
  }
};

// Finite-difference Jacobian of F(q).n plus the divergence-wave column.
Matrix8 powell_jacobian(const Primitive& w, const Vec3& n) {
  const State q = conserved_from_primitive(w);
  Matrix8 A{};
  for (int j = 0; j < kNumMhd; ++j) {
    // Fourth-order central difference.
    const double h = 1e-4 * (1.0 + std::abs(q[j]));
    auto at = [&](double s) {
      State qs = q;
      qs[j] += s * h;
      return flux(qs, n);
    };
    const State f1 = at(1.0), fm1 = at(-1.0), f2 = at(2.0), fm2 = at(-2.0);
    for (int i = 0; i < kNumMhd; ++i) A[i][j] = (8.0 * (f1[i] - fm1[i]) - (f2[i] - fm2[i])) / (12.0 * h);
  }
  const State s{0.0, w.B[0], w.B[1], w.B[2], dot(w.u, w.B), w.u[0], w.u[1], w.u[2]};
  for (int i = 0; i < kNumMhd; ++i)
    for (int d = 0; d < 3; ++d) A[i][kBx + d] += s[i] * n[d];
  return A;
}

double frob(const Matrix8& m) {
  double s = 0.0;
  for (auto& r : m)
    for (double x : r) s += x * x;
  return std::sqrt(s);
}

double identity_residual(const EigenSystem& e) {
  double r = 0.0;
  for (int i = 0; i < kNumMhd; ++i)
    for (int j = 0; j < kNumMhd; ++j) {
      double s = 0.0;
      for (int k = 0; k < kNumMhd; ++k) s += e.R[i][k] * e.L[k][j];
      r = std::max(r, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  return r;
}

double eigen_residual(const Primitive& w, const Vec3& n, const EigenSystem& e) {
  const Matrix8 A = powell_jacobian(w, n);
  Matrix8 res{};
  for (int i = 0; i < kNumMhd; ++i)
    for (int k = 0; k < kNumMhd; ++k) {
      double s = 0.0;
      for (int j = 0; j < kNumMhd; ++j) s += A[i][j] * e.R[j][k];
      res[i][k] = s - e.R[i][k] * e.lambda[k];
    }
  return frob(res) / frob(A);
}

Mat3 rotation(double a, double b, double c) {
  const Mat3 rz{{{std::cos(a), -std::sin(a), 0.0}, {std::sin(a), std::cos(a), 0.0}, {0.0, 0.0, 1.0}}};
  const Mat3 ry{{{std::cos(b), 0.0, std::sin(b)}, {0.0, 1.0, 0.0}, {-std::sin(b), 0.0, std::cos(b)}}};
  const Mat3 rx{{{1.0, 0.0, 0.0}, {0.0, std::cos(c), -std::sin(c)}, {0.0, std::sin(c), std::cos(c)}}};
  return matmul(rz, matmul(ry, rx));
}

const double kSqrt4Pi = std::sqrt(4.0 * kPi);

}  // namespace

TEST_CASE("equation of state") {
  SUBCASE("resting gas") {
    const Primitive w = primitive_from_conserved({1.0, 0.0, 0.0, 0.0, 1.5, 0.0, 0.0, 0.0});
    CHECK(w.p == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("magnetized right shock-tube state") {
    Primitive w;
    w.B = (1.0 / kSqrt4Pi) * Vec3{2.0, 4.0, 2.0};
    const State q = conserved_from_primitive(w);
    // 0.5 * (4 + 16 + 4) / (4 pi) = 3 / pi
    CHECK(q[kEnergy] == doctest::Approx(1.5 + 3.0 / kPi).epsilon(1e-15));
  }
  SUBCASE("moving gas") {
    Primitive w;
    w.rho = 2.0;
    w.u = {1.0, 1.0, 1.0};
    const State q = conserved_from_primitive(w);
    CHECK(q[kEnergy] == doctest::Approx(4.5).epsilon(1e-15));
  }
  SUBCASE("round trip") {
    RandomStates rs;
    for (int t = 0; t < 1000; ++t) {
      const State q = conserved_from_primitive(rs.state());
      const State q2 = conserved_from_primitive(primitive_from_conserved(q));
      for (int v = 0; v < kNumMhd; ++v) CHECK(std::abs(q2[v] - q[v]) <= 1e-13 * (1.0 + std::abs(q[v])));
    }
  }
  SUBCASE("non-positive pressure aborts with the cell") {
    try {
      primitive_from_conserved({1.0, 0.0, 0.0, 0.0, 0.1, 1.0, 0.0, 0.0}, 42);
      FAIL("expected PositivityError");
    } catch (const PositivityError& e) {
      CHECK(e.cell() == 42);
    }
    CHECK_THROWS_AS(primitive_from_conserved({-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0}), PositivityError);
  }
}

TEST_CASE("directional flux") {
  SUBCASE("hydrostatic") {
    Primitive w;
    w.p = 0.7;
    const Vec3 n{0.6, 0.0, 0.8};
    const State f = flux(w, n);
    CHECK(f[kRho] == 0.0);
    for (int d = 0; d < 3; ++d) CHECK(f[kMx + d] == doctest::Approx(0.7 * n[d]));
    CHECK(f[kEnergy] == 0.0);
    for (int d = 0; d < 3; ++d) CHECK(f[kBx + d] == 0.0);
  }
  SUBCASE("shock-tube left state mass flux") {
    Primitive w;
    w.rho = 1.08;
    w.u = {1.2, 0.01, 0.5};
    w.p = 0.95;
    w.B = (1.0 / kSqrt4Pi) * Vec3{2.0, 3.6, 2.0};
    CHECK(flux(w, {1.0, 0.0, 0.0})[kRho] == doctest::Approx(1.296).epsilon(1e-14));
  }
  SUBCASE("rotational invariance") {
    RandomStates rs;
    for (int t = 0; t < 200; ++t) {
      const Primitive w = rs.state();
      const Vec3 n = rs.direction();
      const Mat3 R = rotation(rs.uniform(0, 6), rs.uniform(0, 6), rs.uniform(0, 6));
      Primitive wr = w;
      wr.u = matvec(R, w.u);
      wr.B = matvec(R, w.B);
      const State f = flux(w, n), fr = flux(wr, matvec(R, n));
      CHECK(std::abs(fr[kRho] - f[kRho]) < 1e-12 * (1 + std::abs(f[kRho])));
      CHECK(std::abs(fr[kEnergy] - f[kEnergy]) < 1e-12 * (1 + std::abs(f[kEnergy])));
      const Vec3 m = matvec(R, {f[kMx], f[kMy], f[kMz]}), b = matvec(R, {f[kBx], f[kBy], f[kBz]});
      for (int d = 0; d < 3; ++d) {
        CHECK(std::abs(fr[kMx + d] - m[d]) < 1e-12 * (1 + norm(m)));
        CHECK(std::abs(fr[kBx + d] - b[d]) < 1e-12 * (1 + norm(b)));
      }
    }
  }
}

TEST_CASE("wave speeds") {
  SUBCASE("unmagnetized") {
    const WaveSpeeds s = wave_speeds(Primitive{}, {1.0, 0.0, 0.0});
    CHECK(s.ca == 0.0);
    CHECK(s.cs == 0.0);
    CHECK(s.cf == doctest::Approx(1.290994448735806).epsilon(1e-14));
  }
  SUBCASE("perpendicular field") {
    Primitive w;
    w.B = {0.0, 0.8, -0.6};
    const WaveSpeeds s = wave_speeds(w, {1.0, 0.0, 0.0});
    CHECK(s.ca == 0.0);
    CHECK(s.cs == 0.0);
    CHECK(s.cf == doctest::Approx(std::sqrt(5.0 / 3.0 + 1.0)).epsilon(1e-14));
  }
  SUBCASE("triple degeneracy") {
    Primitive w;
    w.B = {std::sqrt(5.0 / 3.0), 0.0, 0.0};
    const WaveSpeeds s = wave_speeds(w, {1.0, 0.0, 0.0});
    CHECK(s.cf == doctest::Approx(s.a).epsilon(1e-14));
    CHECK(s.ca == doctest::Approx(s.a).epsilon(1e-14));
    CHECK(s.cs == doctest::Approx(s.a).epsilon(1e-14));
    const EigenSystem e = eigen_decomposition(w, {1.0, 0.0, 0.0});
    for (auto& r : e.R)
      for (double x : r) CHECK(std::isfinite(x));
    CHECK(identity_residual(e) < 1e-10);
  }
  SUBCASE("identities and ordering") {
    RandomStates rs;
    for (int t = 0; t < 1000; ++t) {
      const Primitive w = rs.state();
      const Vec3 n = rs.direction();
      const WaveSpeeds s = wave_speeds(w, n);
      CHECK(s.cs <= s.ca);
      CHECK(s.ca <= s.cf);
      const double b2 = dot(w.B, w.B) / w.rho;
      CHECK(std::abs(s.cf * s.cf + s.cs * s.cs - s.a * s.a - b2) < 1e-12 * (s.a * s.a + b2));
      CHECK(std::abs(s.cf * s.cs - s.a * s.ca) < 1e-12 * (s.a * s.a + b2));
    }
  }
}

TEST_CASE("eigensystem") {
  SUBCASE("random states: R L = I and A R = R Lambda") {
    RandomStates rs;
    for (int t = 0; t < 300; ++t) {
      const Primitive w = rs.state();
      const Vec3 n = t % 3 == 0 ? Vec3{0.0, 1.0, 0.0} : rs.direction();
      const EigenSystem e = eigen_decomposition(w, n);
      CHECK(identity_residual(e) < 1e-10);
      CHECK(eigen_residual(w, n, e) < 1e-9);
    }
  }
  SUBCASE("ordering on many random states") {
    RandomStates rs;
    int bad = 0;
    for (int t = 0; t < 100000; ++t) {
      const EigenSystem e = eigen_decomposition(rs.state(), rs.direction());
      for (int k = 0; k + 1 < kNumMhd; ++k)
        if (e.lambda[k] > e.lambda[k + 1]) ++bad;
    }
    CHECK(bad == 0);
  }
  SUBCASE("Euler limit") {
    Primitive w;
    w.u = {0.3, -0.2, 0.1};
    const EigenSystem e = eigen_decomposition(w, {1.0, 0.0, 0.0});
    CHECK(identity_residual(e) < 1e-10);
    CHECK(eigen_residual(w, {1.0, 0.0, 0.0}, e) < 1e-9);
    const double a = std::sqrt(5.0 / 3.0);
    CHECK(e.lambda[0] == doctest::Approx(0.3 - a));
    CHECK(e.lambda[7] == doctest::Approx(0.3 + a));
  }
  SUBCASE("degenerate directions") {
    for (double eps : {1e-3, 1e-6, 1e-9, 0.0}) {
      Primitive w;
      w.B = {eps, 0.7, 0.2};  // B.n -> 0
      const EigenSystem e = eigen_decomposition(w, {1.0, 0.0, 0.0});
      CHECK(identity_residual(e) < 1e-10);
      CHECK(eigen_residual(w, {1.0, 0.0, 0.0}, e) < 1e-8);
      Primitive v;
      v.B = {1.1, eps, 0.0};  // transverse field -> 0, c_f -> c_s region
      const EigenSystem f = eigen_decomposition(v, {1.0, 0.0, 0.0});
      CHECK(identity_residual(f) < 1e-10);
      CHECK(eigen_residual(v, {1.0, 0.0, 0.0}, f) < 1e-8);
    }
  }
  SUBCASE("rotational invariance of eigenvalues") {
    RandomStates rs;
    for (int t = 0; t < 200; ++t) {
      const Primitive w = rs.state();
      const Vec3 n = rs.direction();
      const Mat3 R = rotation(rs.uniform(0, 6), rs.uniform(0, 6), rs.uniform(0, 6));
      Primitive wr = w;
      wr.u = matvec(R, w.u);
      wr.B = matvec(R, w.B);
      const EigenSystem a = eigen_decomposition(w, n), b = eigen_decomposition(wr, matvec(R, n));
      for (int k = 0; k < kNumMhd; ++k) CHECK(std::abs(a.lambda[k] - b.lambda[k]) < 1e-12 * (1 + std::abs(a.lambda[k])));
    }
  }
}

TEST_CASE("f-wave fluctuations") {
  SUBCASE("identical states") {
    const State q = conserved_from_primitive(Primitive{});
    const Fluctuations f = riemann_fluctuations(q, q, {0.0, 1.0, 0.0});
    for (int v = 0; v < kNumMhd; ++v) {
      CHECK(f.minus[v] == 0.0);
      CHECK(f.plus[v] == 0.0);
    }
  }
  SUBCASE("supersonic flow is fully upwinded") {
    Primitive a, b;
    a.u = b.u = {5.0, 0.0, 0.0};
    a.B = {0.3, 0.2, 0.1};
    b.B = {0.3, 0.25, 0.05};
    b.rho = 1.2;
    b.p = 0.9;
    const State qa = conserved_from_primitive(a), qb = conserved_from_primitive(b);
    const Fluctuations f = riemann_fluctuations(qa, qb, {1.0, 0.0, 0.0});
    const State fa = flux(qa, {1.0, 0.0, 0.0}), fb = flux(qb, {1.0, 0.0, 0.0});
    for (int v = 0; v < kNumMhd; ++v) {
      CHECK(std::abs(f.minus[v]) < 1e-13);
      CHECK(f.plus[v] == doctest::Approx(fb[v] - fa[v]).epsilon(1e-12));
    }
  }
  SUBCASE("consistency with the flux difference") {
    RandomStates rs;
    for (int t = 0; t < 2000; ++t) {
      const State qm = conserved_from_primitive(rs.state()), qp = conserved_from_primitive(rs.state());
      const Vec3 n = rs.direction();
      const Fluctuations f = riemann_fluctuations(qm, qp, n);
      const State fm = flux(qm, n), fp = flux(qp, n);
      for (int v = 0; v < kNumMhd; ++v) {
        const double df = fp[v] - fm[v];
        CHECK(std::abs(f.minus[v] + f.plus[v] - df) < 1e-12 * (1.0 + std::abs(fp[v]) + std::abs(fm[v])));
      }
    }
  }
  SUBCASE("shock-tube jump") {
    Primitive l, r;
    l.rho = 1.08;
    l.u = {1.2, 0.01, 0.5};
    l.p = 0.95;
    l.B = (1.0 / kSqrt4Pi) * Vec3{2.0, 3.6, 2.0};
    r.B = (1.0 / kSqrt4Pi) * Vec3{2.0, 4.0, 2.0};
    const State ql = conserved_from_primitive(l), qr = conserved_from_primitive(r);
    const Fluctuations f = riemann_fluctuations(ql, qr, {1.0, 0.0, 0.0});
    const State fl = flux(l, {1.0, 0.0, 0.0}), fr = flux(r, {1.0, 0.0, 0.0});
    for (int v = 0; v < kNumMhd; ++v)
      CHECK(f.minus[v] + f.plus[v] == doctest::Approx(fr[v] - fl[v]).epsilon(1e-12));
    const State F = interface_flux(ql, qr, {1.0, 0.0, 0.0});
    for (int v = 0; v < kNumMhd; ++v) CHECK(F[v] == doctest::Approx(fl[v] + f.minus[v]).epsilon(1e-14));
  }
}
