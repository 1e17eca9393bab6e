#include "ctmhd/potential.hpp"

#include <algorithm>
#include <cmath>

#include "ctmhd/fields.hpp"

namespace ctmhd {

PotentialSolver parse_potential_solver(const std::string& name) {
  if (name == "rusanov") return PotentialSolver::Rusanov;
  if (name == "force") return PotentialSolver::Force;
  throw ConfigError("unknown potential_solver '" + name + "' (expected rusanov or force)");
}

Mat3 coefficient_matrix(int d, const Vec3& u) {
  Mat3 N{};
  for (int i = 0; i < 3; ++i) N[i][i] = u[d];
  for (int j = 0; j < 3; ++j) N[d][j] -= u[j];
  return N;
}

Mat3 directional_matrix(const Vec3& n, const Vec3& u) {
  const double un = dot(n, u);
  Mat3 M{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) M[i][j] = (i == j ? un : 0.0) - n[i] * u[j];
  return M;
}

PathMatrix path_matrix(const Vec3& um, const Vec3& up, const Vec3& n, double alpha_floor) {
  PathMatrix pm;
  const Mat3 Mm = directional_matrix(n, um), Mp = directional_matrix(n, up);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) pm.A[i][j] = 0.5 * (Mm[i][j] + Mp[i][j]);
  pm.alpha = std::max({std::abs(dot(um, n)), std::abs(dot(up, n)), alpha_floor});
  return pm;
}

PotentialFluctuations rusanov_fluctuations(const Vec3& dA, const PathMatrix& pm) {
  const Vec3 Ad = matvec(pm.A, dA);
  PotentialFluctuations f;
  for (int i = 0; i < 3; ++i) {
    f.minus[i] = 0.5 * (Ad[i] - pm.alpha * dA[i]);
    f.plus[i] = 0.5 * (Ad[i] + pm.alpha * dA[i]);
  }
  return f;
}

PotentialFluctuations force_fluctuations(const Vec3& dA, const PathMatrix& pm, double dx, double dt) {
  const Vec3 Ad = matvec(pm.A, dA);
  const Vec3 A2d = matvec(pm.A, Ad);
  const double lf = dx / dt, lw = dt / dx;
  PotentialFluctuations f;
  for (int i = 0; i < 3; ++i) {
    f.minus[i] = 0.25 * (2.0 * Ad[i] - lf * dA[i] - lw * A2d[i]);
    f.plus[i] = 0.25 * (2.0 * Ad[i] + lf * dA[i] + lw * A2d[i]);
  }
  return f;
}

PotentialOperator::PotentialOperator(const MappedGrid& grid, const Reconstructor& rec, PotentialOptions options)
    : grid_(&grid), rec_(&rec), opts_(options) {}

void PotentialOperator::apply(const double* avg, const double* coeff, double dt, double* rhs) const {
  const Extents& e = grid_->extents();
  const std::size_t ncell = e.size();
  const int nc = rec_->ncoeff();
  const int dim = e.dim();
  std::fill(rhs, rhs + 3 * ncell, 0.0);
  const double mask[3] = {opts_.evolve[0] ? 1.0 : 0.0, opts_.evolve[1] ? 1.0 : 0.0, opts_.evolve[2] ? 1.0 : 0.0};

  auto trace3 = [&](std::size_t c, int var, const double* phi) {
    Vec3 r;
    for (int d = 0; d < 3; ++d) {
      const double* cf = coeff + (c * kNumFields + var + d) * nc;
      double v = avg[(var + d) * ncell + c];
      for (int k = 0; k < nc; ++k) v += cf[k] * phi[k];
      r[d] = v;
    }
    return r;
  };

  // Face fluctuations.
  for (int axis = 0; axis < dim; ++axis) {
    const std::ptrdiff_t st = e.stride(axis);
    for (int k = e.lo(2); k < e.hi(2) + (axis == 2 ? 1 : 0); ++k)
      for (int j = e.lo(1); j < e.hi(1) + (axis == 1 ? 1 : 0); ++j)
        for (int i = e.lo(0); i < e.hi(0) + (axis == 0 ? 1 : 0); ++i) {
          const std::size_t cu = e.index(i, j, k);
          const std::size_t cl = cu - st;
          const double ds = 0.5 * (grid_->cell(cl).min_edge + grid_->cell(cu).min_edge);
          const double floor = 1e-10 * ds / dt;
          Vec3 fm{0.0, 0.0, 0.0}, fp{0.0, 0.0, 0.0};
          for (const FaceNode& node : grid_->face(axis, i, j, k).nodes) {
            double phl[kMaxCoeffs], phu[kMaxCoeffs];
            rec_->basis(cl, node.point, phl);
            rec_->basis(cu, node.point, phu);
            const Vec3 Am = trace3(cl, kVarA, phl), Ap = trace3(cu, kVarA, phu);
            const Vec3 um = trace3(cl, kVarU, phl), up = trace3(cu, kVarU, phu);
            Vec3 dA;
            for (int d = 0; d < 3; ++d) dA[d] = mask[d] * (Ap[d] - Am[d]);
            const PathMatrix pm = path_matrix(um, up, node.normal, floor);
            const PotentialFluctuations f = opts_.solver == PotentialSolver::Rusanov
                                                ? rusanov_fluctuations(dA, pm)
                                                : force_fluctuations(dA, pm, ds, dt);
            fm = fm + node.weight * f.minus;
            fp = fp + node.weight * f.plus;
          }
          const int idx[3] = {i, j, k};
          if (idx[axis] > e.lo(axis)) {
            const double s = 1.0 / grid_->cell(cl).volume;
            for (int d = 0; d < 3; ++d) rhs[d * ncell + cl] -= s * mask[d] * fm[d];
          }
          if (idx[axis] < e.hi(axis)) {
            const double s = 1.0 / grid_->cell(cu).volume;
            for (int d = 0; d < 3; ++d) rhs[d * ncell + cu] -= s * mask[d] * fp[d];
          }
        }
  }

  const bool has_background = opts_.background != Vec3{0.0, 0.0, 0.0};
  // Volume term: sum_d N_d(u) dA/dx_d = (u . grad) A - grad(A)^T u.
  e.for_each(0, [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k);
    double phi[kMaxCoeffs], grad[3 * kMaxCoeffs];
    Vec3 acc{0.0, 0.0, 0.0};
    for (const VolumeNode& node : grid_->volume_nodes(c)) {
      rec_->basis(c, node.point, phi);
      rec_->basis_gradient(c, node.point, grad);
      const Vec3 u = trace3(c, kVarU, phi);
      // G[a][d] = dA_a / dx_d
      double G[3][3] = {};
      for (int a = 0; a < 3; ++a) {
        if (mask[a] == 0.0) continue;
        const double* cf = coeff + (c * kNumFields + kVarA + a) * nc;
        for (int d = 0; d < dim; ++d) {
          double s = 0.0;
          for (int m = 0; m < nc; ++m) s += cf[m] * grad[d * nc + m];
          G[a][d] = s;
        }
      }
      for (int a = 0; a < 3; ++a) {
        double r = 0.0;
        for (int d = 0; d < 3; ++d) r += u[d] * G[a][d] - u[d] * G[d][a];
        acc[a] += node.weight * r;
      }
      if (has_background) acc = acc - node.weight * cross(u, opts_.background);
    }
    const double s = 1.0 / grid_->cell(c).volume;
    for (int d = 0; d < 3; ++d) rhs[d * ncell + c] -= s * mask[d] * acc[d];
  });
}

}  // namespace ctmhd
