#include "ctmhd/curl.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ctmhd/fields.hpp"

namespace ctmhd {

CurlOperator::CurlOperator(const MappedGrid& grid, const Reconstructor& rec) : grid_(&grid), rec_(&rec) {}

void CurlOperator::apply(const double* avg, const double* coeff, const std::array<bool, 3>& write,
                         double* out) const {
  const Extents& e = grid_->extents();
  const std::size_t ncell = e.size();
  const int nc = rec_->ncoeff();
  const int dim = e.dim();
  std::vector<double> acc(3 * ncell, 0.0);

  auto traceA = [&](std::size_t c, const double* phi) {
    Vec3 r;
    for (int d = 0; d < 3; ++d) {
      const double* cf = coeff + (c * kNumFields + kVarA + d) * nc;
      double v = avg[(kVarA + d) * ncell + c];
      for (int k = 0; k < nc; ++k) v += cf[k] * phi[k];
      r[d] = v;
    }
    return r;
  };

  for (int axis = 0; axis < dim; ++axis) {
    const std::ptrdiff_t st = e.stride(axis);
    for (int k = e.lo(2); k < e.hi(2) + (axis == 2 ? 1 : 0); ++k)
      for (int j = e.lo(1); j < e.hi(1) + (axis == 1 ? 1 : 0); ++j)
        for (int i = e.lo(0); i < e.hi(0) + (axis == 0 ? 1 : 0); ++i) {
          const std::size_t cu = e.index(i, j, k);
          const std::size_t cl = cu - st;
          Vec3 flux{0.0, 0.0, 0.0};
          for (const FaceNode& node : grid_->face(axis, i, j, k).nodes) {
            double phl[kMaxCoeffs], phu[kMaxCoeffs];
            rec_->basis(cl, node.point, phl);
            rec_->basis(cu, node.point, phu);
            const Vec3 abar = 0.5 * (traceA(cl, phl) + traceA(cu, phu));
            flux = flux + node.weight * cross(node.normal, abar);
          }
          // The same face value enters both cells with opposite orientation.
          const int idx[3] = {i, j, k};
          if (idx[axis] > e.lo(axis))
            for (int d = 0; d < 3; ++d) acc[d * ncell + cl] += flux[d];
          if (idx[axis] < e.hi(axis))
            for (int d = 0; d < 3; ++d) acc[d * ncell + cu] -= flux[d];
        }
  }

  e.for_each(0, [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k);
    const double s = 1.0 / grid_->cell(c).volume;
    for (int d = 0; d < 3; ++d)
      if (write[d]) out[d * ncell + c] = s * acc[d * ncell + c];
  });
}

DivergenceStats divergence(const MappedGrid& grid, const double* b) {
  const Extents& e = grid.extents();
  const std::size_t ncell = e.size();
  std::vector<double> div(ncell, 0.0);
  for (int axis = 0; axis < e.dim(); ++axis) {
    const std::ptrdiff_t st = e.stride(axis);
    for (int k = e.lo(2); k < e.hi(2) + (axis == 2 ? 1 : 0); ++k)
      for (int j = e.lo(1); j < e.hi(1) + (axis == 1 ? 1 : 0); ++j)
        for (int i = e.lo(0); i < e.hi(0) + (axis == 0 ? 1 : 0); ++i) {
          const std::size_t cu = e.index(i, j, k);
          const std::size_t cl = cu - st;
          Vec3 bf;
          for (int d = 0; d < 3; ++d) bf[d] = 0.5 * (b[d * ncell + cl] + b[d * ncell + cu]);
          double flux = 0.0;
          for (const FaceNode& node : grid.face(axis, i, j, k).nodes) flux += node.weight * dot(node.normal, bf);
          div[cl] += flux;
          div[cu] -= flux;
        }
  }
  DivergenceStats s;
  double vol = 0.0;
  e.for_each(0, [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k);
    const double v = grid.cell(c).volume;
    const double d = std::abs(div[c]) / v;
    s.max = std::max(s.max, d);
    s.l1 += v * d;
    vol += v;
  });
  s.l1 /= vol;
  return s;
}

Vec3 total_field(const MappedGrid& grid, const double* b) {
  const Extents& e = grid.extents();
  const std::size_t ncell = e.size();
  Vec3 t{0.0, 0.0, 0.0};
  e.for_each(0, [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k);
    for (int d = 0; d < 3; ++d) t[d] += grid.cell(c).volume * b[d * ncell + c];
  });
  return t;
}

}  // namespace ctmhd
