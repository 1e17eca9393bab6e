#pragma once

// Discrete curl of the vector potential through the divergence theorem,
//   B = (1/|C|) sum_faces int (nu x A) dS,
// with A on each face node taken as the average of the two adjacent
// cell traces, plus divergence and conservation diagnostics.

#include <array>
#include <cstddef>

#include "ctmhd/geometry.hpp"
#include "ctmhd/reconstruction.hpp"

namespace ctmhd {

class CurlOperator {
 public:
  CurlOperator(const MappedGrid& grid, const Reconstructor& rec);

  /// Writes B_d for the components with write[d] into out[d * ncell + c] for
  /// interior cells. avg/coeff follow the layout in fields.hpp and must hold A
  /// reconstructions in the first ghost layer.
  void apply(const double* avg, const double* coeff, const std::array<bool, 3>& write, double* out) const;

 private:
  const MappedGrid* grid_;
  const Reconstructor* rec_;
};

struct DivergenceStats {
  double max = 0.0;
  double l1 = 0.0;  // volume-weighted mean of |div B|
};

/// Centred divergence of cell-average B: (1/|C|) sum_faces 1/2 (B_i + B_nbr) . n dS.
/// B is SoA with three components (b[d * ncell + c]); ghosts must be filled.
DivergenceStats divergence(const MappedGrid& grid, const double* b);

/// sum |C| B over interior cells.
Vec3 total_field(const MappedGrid& grid, const double* b);

}  // namespace ctmhd
