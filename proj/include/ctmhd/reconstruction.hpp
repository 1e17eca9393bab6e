#pragma once

// Mean-preserving quadratic least-squares reconstruction with a CWENO-type
// limiter built from one central quadratic and 2*dim one-sided linear fits.
//
// A cell polynomial is stored as coefficients c_k of the zero-mean basis
//   p(x) = Q_i + sum_k c_k (phi_k(X) - mean_i(phi_k)),  X = (x - centroid_i) / h_i,
// with monomials X, Y, Z first and the quadratic terms after them.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ctmhd/geometry.hpp"

namespace ctmhd {

inline constexpr int kMaxCoeffs = 9;
inline constexpr int kMaxNeighbors = 26;

struct ReconstructionOptions {
  bool limit = true;          // false: central quadratic fit only
  double central_weight = 100.0;
};

int num_coeffs(int dim);

class Reconstructor {
 public:
  Reconstructor(const MappedGrid& grid, ReconstructionOptions options = {});

  const MappedGrid& grid() const { return *grid_; }
  int dim() const { return dim_; }
  int ncoeff() const { return ncoeff_; }
  int nneighbors() const { return static_cast<int>(offsets_.size()); }
  const ReconstructionOptions& options() const { return opts_; }

  /// Coefficients for every cell within `layers` ghost layers of the interior
  /// (at most kGhost - 1). out[c * stride + k] receives coefficient k of cell c.
  void reconstruct(const double* q, double* out, std::size_t stride, int layers = 1) const {
    reconstruct(q, out, stride, layers, opts_.limit);
  }
  /// Same, overriding the limiter switch of the options.
  void reconstruct(const double* q, double* out, std::size_t stride, int layers, bool limit) const;

  /// Coefficients of one cell. `scale` is the global data range of the field,
  /// used to size the limiter's regularization.
  void reconstruct_cell(const double* q, std::size_t c, double* coeff, double scale) const {
    reconstruct_cell(q, c, coeff, scale, opts_.limit);
  }
  void reconstruct_cell(const double* q, std::size_t c, double* coeff, double scale, bool limit) const;

  /// max - min of the field over all cells including ghosts.
  double field_range(const double* q) const;

  /// Unlimited central fit of one cell.
  void central_fit(const double* q, std::size_t c, double* coeff) const;

  /// Zero-mean basis values phi_k(X) - mean(phi_k) of cell c at physical x.
  void basis(std::size_t c, const Vec3& x, double* phi) const;
  /// Physical gradient of the basis: grad[d * ncoeff + k] = d phi_k / d x_d.
  void basis_gradient(std::size_t c, const Vec3& x, double* grad) const;

  /// Evaluate Q_c + coeff . basis at x.
  double evaluate(std::size_t c, double qc, const double* coeff, const Vec3& x) const;

  /// 1 / h for cell c, with h = |C|^(1/dim) the basis scaling length.
  double inv_h(std::size_t c) const { return inv_h_[c]; }

  /// Laplacian of the cell polynomial (constant for degree 2).
  double laplacian(std::size_t c, const double* coeff) const;

  /// Largest max-edge / min-edge ratio over any stencil.
  double max_stencil_stretch() const { return max_stretch_; }

 private:
  struct Stencil {
    // Central weighted pseudo-inverse, ncoeff x nneighbors, row major.
    std::array<double, kMaxCoeffs * kMaxNeighbors> central{};
    // One-sided linear pseudo-inverses, per side (2*dim), dim x side_neighbors.
    std::array<double, 6 * 3 * 9> sided{};
    std::array<double, kMaxCoeffs> mean{};
  };

  void build_stencil(std::size_t c, Stencil& s) const;
  const Stencil& stencil(std::size_t c) const { return stencils_.size() == 1 ? stencils_[0] : stencils_[c]; }
  void monomials(const double* X, double* phi) const;

  const MappedGrid* grid_;
  ReconstructionOptions opts_;
  int dim_;
  int ncoeff_;
  std::vector<std::array<int, 3>> offsets_;
  std::vector<std::ptrdiff_t> neighbor_shift_;
  // Per side (2*dim): indices into offsets_ of neighbors on that side.
  std::vector<std::vector<int>> side_neighbors_;
  std::vector<Stencil> stencils_;
  std::vector<double> inv_h_;
  double max_stretch_ = 1.0;
};

}  // namespace ctmhd
