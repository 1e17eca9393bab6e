#include "ctmhd/mhd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace ctmhd {

namespace {

[[noreturn]] void positivity_failure(const char* what, const State& q, std::size_t cell) {
  std::ostringstream os;
  os.precision(6);
  os << what << " (rho=" << q[kRho] << ", m=(" << q[kMx] << "," << q[kMy] << "," << q[kMz]
     << "), E=" << q[kEnergy] << ", B=(" << q[kBx] << "," << q[kBy] << "," << q[kBz] << "))";
  throw PositivityError(os.str(), cell);
}

}  // namespace

Primitive primitive_from_conserved(const State& q, std::size_t cell) {
  if (!(q[kRho] > 0.0)) positivity_failure("non-positive density", q, cell);
  Primitive w;
  w.rho = q[kRho];
  const double inv = 1.0 / q[kRho];
  w.u = {q[kMx] * inv, q[kMy] * inv, q[kMz] * inv};
  w.B = {q[kBx], q[kBy], q[kBz]};
  w.p = (kGamma - 1.0) * (q[kEnergy] - 0.5 * dot(w.B, w.B) - 0.5 * w.rho * dot(w.u, w.u));
  if (!(w.p > 0.0)) positivity_failure("non-positive pressure", q, cell);
  return w;
}

State conserved_from_primitive(const Primitive& w) {
  return {w.rho,
          w.rho * w.u[0],
          w.rho * w.u[1],
          w.rho * w.u[2],
          w.p / (kGamma - 1.0) + 0.5 * w.rho * dot(w.u, w.u) + 0.5 * dot(w.B, w.B),
          w.B[0],
          w.B[1],
          w.B[2]};
}

State flux(const Primitive& w, const Vec3& n) {
  const double un = dot(w.u, n), Bn = dot(w.B, n);
  const double b2 = dot(w.B, w.B);
  const double pt = w.p + 0.5 * b2;
  const double E = w.p / (kGamma - 1.0) + 0.5 * w.rho * dot(w.u, w.u) + 0.5 * b2;
  State f;
  f[kRho] = w.rho * un;
  for (int d = 0; d < 3; ++d) {
    f[kMx + d] = w.rho * w.u[d] * un + pt * n[d] - w.B[d] * Bn;
    f[kBx + d] = w.B[d] * un - w.u[d] * Bn;
  }
  f[kEnergy] = (E + pt) * un - dot(w.u, w.B) * Bn;
  return f;
}

State flux(const State& q, const Vec3& n) { return flux(primitive_from_conserved(q), n); }

WaveSpeeds wave_speeds(const Primitive& w, const Vec3& n) {
  const double a2 = kGamma * w.p / w.rho;
  const double b2 = dot(w.B, w.B) / w.rho;
  const double Bn = dot(w.B, n);
  const double ca2 = Bn * Bn / w.rho;
  const double bt2 = std::max(b2 - ca2, 0.0);
  const double D = std::sqrt((a2 - b2) * (a2 - b2) + 4.0 * a2 * bt2);
  const double cf2 = 0.5 * (a2 + b2 + D);
  const double cs2 = a2 * ca2 / cf2;
  WaveSpeeds s;
  s.a = std::sqrt(a2);
  s.ca = std::sqrt(ca2);
  s.cf = std::max(std::sqrt(cf2), s.ca);
  s.cs = std::min(std::sqrt(cs2), s.ca);
  return s;
}

void local_frame(const Vec3& n, Vec3& t1, Vec3& t2) {
  Vec3 t;
  if (std::abs(n[2]) < 0.9)
    t = cross(Vec3{0.0, 0.0, 1.0}, n);
  else
    t = cross(Vec3{0.0, 1.0, 0.0}, n);
  t1 = (1.0 / norm(t)) * t;
  t2 = cross(n, t1);
}

namespace {

using Vec8 = std::array<double, kNumMhd>;

// Primitive eigensystem of the 1D Godunov-Powell system in a local frame,
// variables (rho, u_n, u_t1, u_t2, p, B_n, B_t1, B_t2).
struct LocalEigen {
  double lambda[kNumMhd];
  double r[kNumMhd][kNumMhd];  // r[k] = k-th right eigenvector
  double l[kNumMhd][kNumMhd];  // l[k] = k-th left eigenvector
};

void local_eigen(const Primitive& w, LocalEigen& e) {
  const double rho = w.rho, sr = std::sqrt(rho);
  const double a2 = kGamma * w.p / rho, a = std::sqrt(a2);
  const double Bn = w.B[0], By = w.B[1], Bz = w.B[2];
  const double bt = std::sqrt(By * By + Bz * Bz);
  const double b2 = (Bn * Bn + bt * bt) / rho;
  const double ca2 = Bn * Bn / rho;
  const double D = std::sqrt((a2 - b2) * (a2 - b2) + 4.0 * a2 * bt * bt / rho);
  const double cf2 = 0.5 * (a2 + b2 + D);
  const double cs2 = a2 * ca2 / cf2;
  const double ca = std::sqrt(ca2);
  const double cf = std::max(std::sqrt(cf2), ca);
  const double cs = std::min(std::sqrt(cs2), ca);

  double af, as;
  if (D > 0.0) {
    af = std::sqrt(std::clamp((D + a2 - b2) / (2.0 * D), 0.0, 1.0));
    as = std::sqrt(std::clamp((D - a2 + b2) / (2.0 * D), 0.0, 1.0));
  } else {
    af = 1.0;
    as = 0.0;
  }
  double by, bz;
  if (bt > 0.0) {
    by = By / bt;
    bz = Bz / bt;
  } else {
    by = bz = 1.0 / std::sqrt(2.0);
  }
  const double S = Bn >= 0.0 ? 1.0 : -1.0;
  const double un = w.u[0];

  e.lambda[0] = un - cf;
  e.lambda[1] = un - ca;
  e.lambda[2] = un - cs;
  e.lambda[3] = un;
  e.lambda[4] = un;
  e.lambda[5] = un + cs;
  e.lambda[6] = un + ca;
  e.lambda[7] = un + cf;

  for (auto& row : e.r) std::fill(row, row + kNumMhd, 0.0);
  for (auto& row : e.l) std::fill(row, row + kNumMhd, 0.0);

  const double inv_n = 1.0 / (2.0 * a2);
  for (int side = 0; side < 2; ++side) {
    const double sg = side == 0 ? -1.0 : 1.0;
    double* rf = e.r[side == 0 ? 0 : 7];
    double* ra = e.r[side == 0 ? 1 : 6];
    double* rs = e.r[side == 0 ? 2 : 5];
    double* lf = e.l[side == 0 ? 0 : 7];
    double* la = e.l[side == 0 ? 1 : 6];
    double* ls = e.l[side == 0 ? 2 : 5];

    rf[0] = rho * af;
    rf[1] = sg * cf * af;
    rf[2] = -sg * S * cs * as * by;
    rf[3] = -sg * S * cs * as * bz;
    rf[4] = rho * a2 * af;
    rf[6] = sr * a * as * by;
    rf[7] = sr * a * as * bz;

    ra[2] = -bz;
    ra[3] = by;
    ra[6] = sg * S * sr * bz;
    ra[7] = -sg * S * sr * by;

    rs[0] = rho * as;
    rs[1] = sg * cs * as;
    rs[2] = sg * S * cf * af * by;
    rs[3] = sg * S * cf * af * bz;
    rs[4] = rho * a2 * as;
    rs[6] = -sr * a * af * by;
    rs[7] = -sr * a * af * bz;

    lf[1] = inv_n * sg * cf * af;
    lf[2] = -inv_n * sg * S * cs * as * by;
    lf[3] = -inv_n * sg * S * cs * as * bz;
    lf[4] = inv_n * af / rho;
    lf[6] = inv_n * a * as * by / sr;
    lf[7] = inv_n * a * as * bz / sr;

    la[2] = -0.5 * bz;
    la[3] = 0.5 * by;
    la[6] = 0.5 * sg * S * bz / sr;
    la[7] = -0.5 * sg * S * by / sr;

    ls[1] = inv_n * sg * cs * as;
    ls[2] = inv_n * sg * S * cf * af * by;
    ls[3] = inv_n * sg * S * cf * af * bz;
    ls[4] = inv_n * as / rho;
    ls[6] = -inv_n * a * af * by / sr;
    ls[7] = -inv_n * a * af * bz / sr;
  }
  e.r[3][0] = 1.0;
  e.l[3][0] = 1.0;
  e.l[3][4] = -1.0 / a2;
  e.r[4][5] = 1.0;
  e.l[4][5] = 1.0;
}

// dW = (dU/dW)^-1 dU
Vec8 to_primitive_increment(const Primitive& w, const Vec8& dU) {
  Vec8 dW;
  const Vec3 dm{dU[kMx], dU[kMy], dU[kMz]};
  const Vec3 dB{dU[kBx], dU[kBy], dU[kBz]};
  dW[0] = dU[kRho];
  for (int d = 0; d < 3; ++d) dW[1 + d] = (dm[d] - w.u[d] * dU[kRho]) / w.rho;
  dW[4] = (kGamma - 1.0) * (0.5 * dot(w.u, w.u) * dU[kRho] - dot(w.u, dm) + dU[kEnergy] - dot(w.B, dB));
  for (int d = 0; d < 3; ++d) dW[5 + d] = dB[d];
  return dW;
}

// dU = (dU/dW) dW
Vec8 to_conserved_increment(const Primitive& w, const Vec8& dW) {
  Vec8 dU;
  const Vec3 du{dW[1], dW[2], dW[3]};
  const Vec3 dB{dW[5], dW[6], dW[7]};
  dU[kRho] = dW[0];
  for (int d = 0; d < 3; ++d) dU[kMx + d] = w.u[d] * dW[0] + w.rho * du[d];
  dU[kEnergy] = 0.5 * dot(w.u, w.u) * dW[0] + w.rho * dot(w.u, du) + dW[4] / (kGamma - 1.0) + dot(w.B, dB);
  for (int d = 0; d < 3; ++d) dU[kBx + d] = dB[d];
  return dU;
}

struct Frame {
  Vec3 n, t1, t2;
};

Vec3 to_local(const Frame& f, const Vec3& v) { return {dot(v, f.n), dot(v, f.t1), dot(v, f.t2)}; }
Vec3 to_global(const Frame& f, const Vec3& v) { return v[0] * f.n + v[1] * f.t1 + v[2] * f.t2; }

Vec8 rotate_increment(const Frame& f, const Vec8& v, bool forward) {
  auto rot = forward ? to_local : to_global;
  const Vec3 u = rot(f, {v[1], v[2], v[3]});
  const Vec3 B = rot(f, {v[5], v[6], v[7]});
  return {v[0], u[0], u[1], u[2], v[4], B[0], B[1], B[2]};
}

Primitive local_state(const Frame& f, const Primitive& w) {
  Primitive l = w;
  l.u = to_local(f, w.u);
  l.B = to_local(f, w.B);
  return l;
}

Frame make_frame(const Vec3& n) {
  Frame f;
  f.n = n;
  local_frame(n, f.t1, f.t2);
  return f;
}

void split(const Primitive& wm, const Primitive& wp, const Vec3& n, State* minus, State* plus, State* fm) {
  const State Fm = flux(wm, n);
  const State Fp = flux(wp, n);
  Vec8 dF;
  for (int v = 0; v < kNumMhd; ++v) dF[v] = Fp[v] - Fm[v];
  if (fm) *fm = Fm;

  Primitive wa;
  wa.rho = 0.5 * (wm.rho + wp.rho);
  wa.p = 0.5 * (wm.p + wp.p);
  wa.u = 0.5 * (wm.u + wp.u);
  wa.B = 0.5 * (wm.B + wp.B);

  const Frame f = make_frame(n);
  const Primitive wl = local_state(f, wa);
  const Vec8 dW = rotate_increment(f, to_primitive_increment(wa, dF), true);
  LocalEigen e;
  local_eigen(wl, e);

  Vec8 sm{}, sp{};
  for (int k = 0; k < kNumMhd; ++k) {
    double beta = 0.0;
    for (int v = 0; v < kNumMhd; ++v) beta += e.l[k][v] * dW[v];
    double cm = 0.0, cp = 0.0;
    if (e.lambda[k] < 0.0)
      cm = beta;
    else if (e.lambda[k] > 0.0)
      cp = beta;
    else
      cm = cp = 0.5 * beta;
    for (int v = 0; v < kNumMhd; ++v) {
      sm[v] += cm * e.r[k][v];
      sp[v] += cp * e.r[k][v];
    }
  }
  if (minus) *minus = to_conserved_increment(wa, rotate_increment(f, sm, false));
  if (plus) *plus = to_conserved_increment(wa, rotate_increment(f, sp, false));
}

}  // namespace

EigenSystem eigen_decomposition(const Primitive& w, const Vec3& n) {
  const Frame f = make_frame(n);
  LocalEigen e;
  local_eigen(local_state(f, w), e);
  EigenSystem out;
  for (int k = 0; k < kNumMhd; ++k) {
    out.lambda[k] = e.lambda[k];
    Vec8 r;
    std::copy(e.r[k], e.r[k] + kNumMhd, r.begin());
    const Vec8 col = to_conserved_increment(w, rotate_increment(f, r, false));
    for (int v = 0; v < kNumMhd; ++v) out.R[v][k] = col[v];
  }
  for (int j = 0; j < kNumMhd; ++j) {
    Vec8 unit{};
    unit[j] = 1.0;
    const Vec8 dW = rotate_increment(f, to_primitive_increment(w, unit), true);
    for (int k = 0; k < kNumMhd; ++k) {
      double s = 0.0;
      for (int v = 0; v < kNumMhd; ++v) s += e.l[k][v] * dW[v];
      out.L[k][j] = s;
    }
  }
  return out;
}

Fluctuations riemann_fluctuations(const State& qm, const State& qp, const Vec3& n, std::size_t cell) {
  Fluctuations out;
  split(primitive_from_conserved(qm, cell), primitive_from_conserved(qp, cell), n, &out.minus, &out.plus,
        nullptr);
  return out;
}

State interface_flux(const State& qm, const State& qp, const Vec3& n, std::size_t cell) {
  State minus, fm;
  split(primitive_from_conserved(qm, cell), primitive_from_conserved(qp, cell), n, &minus, nullptr, &fm);
  for (int v = 0; v < kNumMhd; ++v) fm[v] += minus[v];
  return fm;
}

MhdOperator::MhdOperator(const MappedGrid& grid, const Reconstructor& rec) : grid_(&grid), rec_(&rec) {}

void MhdOperator::apply(const double* q, const double* coeff, int nvar, double* rhs) const {
  const Extents& e = grid_->extents();
  const std::size_t ncell = e.size();
  const int nc = rec_->ncoeff();
  std::fill(rhs, rhs + kNumMhd * ncell, 0.0);

  auto trace = [&](std::size_t c, const double* phi) {
    State s;
    for (int v = 0; v < kNumMhd; ++v) {
      const double* cf = coeff + (c * nvar + v) * nc;
      double val = q[v * ncell + c];
      for (int k = 0; k < nc; ++k) val += cf[k] * phi[k];
      s[v] = val;
    }
    return s;
  };

  for (int axis = 0; axis < e.dim(); ++axis) {
    const std::ptrdiff_t st = e.stride(axis);
    for (int k = e.lo(2); k < e.hi(2) + (axis == 2 ? 1 : 0); ++k)
      for (int j = e.lo(1); j < e.hi(1) + (axis == 1 ? 1 : 0); ++j)
        for (int i = e.lo(0); i < e.hi(0) + (axis == 0 ? 1 : 0); ++i) {
          const std::size_t cu = e.index(i, j, k);
          const std::size_t cl = cu - st;
          const FaceGeometry face = grid_->face(axis, i, j, k);
          State total{};
          for (const FaceNode& node : face.nodes) {
            double phl[kMaxCoeffs], phu[kMaxCoeffs];
            rec_->basis(cl, node.point, phl);
            rec_->basis(cu, node.point, phu);
            const Primitive wm = primitive_from_conserved(trace(cl, phl), cl);
            const Primitive wp = primitive_from_conserved(trace(cu, phu), cu);
            State minus, fm;
            split(wm, wp, node.normal, &minus, nullptr, &fm);
            for (int v = 0; v < kNumMhd; ++v) total[v] += node.weight * (fm[v] + minus[v]);
          }
          const int idx[3] = {i, j, k};
          if (idx[axis] > e.lo(axis)) {
            const double s = 1.0 / grid_->cell(cl).volume;
            for (int v = 0; v < kNumMhd; ++v) rhs[v * ncell + cl] -= s * total[v];
          }
          if (idx[axis] < e.hi(axis)) {
            const double s = 1.0 / grid_->cell(cu).volume;
            for (int v = 0; v < kNumMhd; ++v) rhs[v * ncell + cu] += s * total[v];
          }
        }
  }
}

namespace {

double pressure_of(const State& s) {
  const double m2 = s[kMx] * s[kMx] + s[kMy] * s[kMy] + s[kMz] * s[kMz];
  const double b2 = s[kBx] * s[kBx] + s[kBy] * s[kBy] + s[kBz] * s[kBz];
  return (kGamma - 1.0) * (s[kEnergy] - 0.5 * m2 / s[kRho] - 0.5 * b2);
}

}  // namespace

std::size_t MhdOperator::limit_traces(const double* q, double* coeff, int nvar, double floor) const {
  const Extents& e = grid_->extents();
  const std::size_t ncell = e.size();
  const int nc = rec_->ncoeff();
  std::vector<double> theta(ncell, 1.0);

  // Largest s in [0, 1] with mean + s (trace - mean) admissible; the mean
  // state is admissible and p is concave in the conserved variables.
  auto scale_for = [&](std::size_t c, const double* phi) {
    State mean, tr;
    for (int v = 0; v < kNumMhd; ++v) {
      const double* cf = coeff + (c * nvar + v) * nc;
      double d = 0.0;
      for (int k = 0; k < nc; ++k) d += cf[k] * phi[k];
      mean[v] = q[v * ncell + c];
      tr[v] = mean[v] + d;
    }
    const double rho_min = floor * mean[kRho], p_min = floor * pressure_of(mean);
    double s = 1.0;
    if (tr[kRho] < rho_min) s = (mean[kRho] - rho_min) / (mean[kRho] - tr[kRho]);
    auto ok = [&](double t) {
      State x;
      for (int v = 0; v < kNumMhd; ++v) x[v] = mean[v] + t * (tr[v] - mean[v]);
      return x[kRho] >= rho_min && pressure_of(x) >= p_min;
    };
    if (ok(s)) return s;
    double lo = 0.0, hi = s;
    for (int it = 0; it < 30; ++it) {
      const double mid = 0.5 * (lo + hi);
      (ok(mid) ? lo : hi) = mid;
    }
    return lo;
  };

  for (int axis = 0; axis < e.dim(); ++axis) {
    const std::ptrdiff_t st = e.stride(axis);
    for (int k = e.lo(2); k < e.hi(2) + (axis == 2 ? 1 : 0); ++k)
      for (int j = e.lo(1); j < e.hi(1) + (axis == 1 ? 1 : 0); ++j)
        for (int i = e.lo(0); i < e.hi(0) + (axis == 0 ? 1 : 0); ++i) {
          const std::size_t cu = e.index(i, j, k);
          const std::size_t cl = cu - st;
          for (const FaceNode& node : grid_->face(axis, i, j, k).nodes) {
            double phi[kMaxCoeffs];
            rec_->basis(cl, node.point, phi);
            theta[cl] = std::min(theta[cl], scale_for(cl, phi));
            rec_->basis(cu, node.point, phi);
            theta[cu] = std::min(theta[cu], scale_for(cu, phi));
          }
        }
  }
  std::size_t count = 0;
  for (std::size_t c = 0; c < ncell; ++c) {
    if (theta[c] >= 1.0) continue;
    ++count;
    for (int v = 0; v < kNumMhd; ++v) {
      double* cf = coeff + (c * nvar + v) * nc;
      for (int k = 0; k < nc; ++k) cf[k] *= theta[c];
    }
  }
  return count;
}

void MhdOperator::check_admissible(const double* q) const {
  const Extents& e = grid_->extents();
  const std::size_t ncell = e.size();
  e.for_each(e.ghost(), [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k);
    State s;
    for (int v = 0; v < kNumMhd; ++v) s[v] = q[v * ncell + c];
    for (double x : s)
      if (!std::isfinite(x)) positivity_failure("non-finite state", s, c);
    primitive_from_conserved(s, c);
  });
}

double MhdOperator::stable_dt(const double* q, double cfl) const {
  const Extents& e = grid_->extents();
  const std::size_t ncell = e.size();
  double dt = 1e300;
  e.for_each(0, [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k);
    State s;
    for (int v = 0; v < kNumMhd; ++v) s[v] = q[v * ncell + c];
    const Primitive w = primitive_from_conserved(s, c);
    double smax = 0.0;
    for (int axis = 0; axis < e.dim(); ++axis) {
      const FaceGeometry face = grid_->face(axis, i, j, k);
      for (const FaceNode& node : face.nodes) {
        const WaveSpeeds ws = wave_speeds(w, node.normal);
        smax = std::max(smax, std::abs(dot(w.u, node.normal)) + ws.cf);
      }
    }
    if (smax > 0.0) dt = std::min(dt, grid_->cell(c).min_edge / smax);
  });
  return cfl * dt;
}

}  // namespace ctmhd
