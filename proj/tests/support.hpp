#pragma once

// Shared helpers for the unit tests: grid construction and cell averages of
// analytic fields, including ghost cells (their geometry comes from the mapping).

#include <functional>
#include <vector>

#include "ctmhd/fields.hpp"
#include "ctmhd/geometry.hpp"
#include "ctmhd/reconstruction.hpp"

namespace ctmhd::test {

using Field = std::function<double(const Vec3&)>;

inline GridDescriptor box(std::array<int, 3> n, int dim) {
  GridDescriptor g;
  g.dim = dim;
  g.cells = {n[0], dim > 1 ? n[1] : 1, dim > 2 ? n[2] : 1};
  return g;
}

inline void fill_averages(const MappedGrid& g, const Field& f, double* q, int order = 5) {
  const auto rule = QuadratureRule::gauss(order);
  g.extents().for_each(MappedGrid::kGhost, [&](int i, int j, int k) {
    const std::size_t c = g.extents().index(i, j, k);
    double s = 0.0, v = 0.0;
    for (const auto& node : g.cell_quadrature(c, rule)) {
      s += node.weight * f(node.point);
      v += node.weight;
    }
    q[c] = s / v;
  });
}

inline std::vector<double> averages(const MappedGrid& g, const Field& f) {
  std::vector<double> q(g.extents().size(), 0.0);
  fill_averages(g, f, q.data());
  return q;
}

// Full field block (kNumFields variables) with A and u set from analytic
// functions; the MHD slots stay zero.
struct FieldBlock {
  std::vector<double> avg;
  std::vector<double> coeff;
};

inline FieldBlock potential_block(const MappedGrid& g, const Reconstructor& r, const std::array<Field, 3>& A,
                                  const std::array<Field, 3>& u) {
  const std::size_t n = g.extents().size();
  const int nc = r.ncoeff();
  FieldBlock b;
  b.avg.assign(kNumFields * n, 0.0);
  b.coeff.assign(kNumFields * n * nc, 0.0);
  for (int d = 0; d < 3; ++d) {
    fill_averages(g, A[d], &b.avg[(kVarA + d) * n]);
    fill_averages(g, u[d], &b.avg[(kVarU + d) * n]);
  }
  for (int v = kVarA; v < kNumFields; ++v)
    r.reconstruct(&b.avg[v * n], &b.coeff[v * nc], static_cast<std::size_t>(kNumFields) * nc);
  return b;
}

inline Field constant(double v) {
  return [v](const Vec3&) { return v; };
}

}  // namespace ctmhd::test
