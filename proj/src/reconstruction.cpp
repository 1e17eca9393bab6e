#include "ctmhd/reconstruction.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctmhd/log.hpp"

namespace ctmhd {

int num_coeffs(int dim) { return dim == 1 ? 2 : (dim == 2 ? 5 : 9); }

void Reconstructor::monomials(const double* X, double* phi) const {
  switch (dim_) {
    case 1:
      phi[0] = X[0];
      phi[1] = X[0] * X[0];
      break;
    case 2:
      phi[0] = X[0];
      phi[1] = X[1];
      phi[2] = X[0] * X[0];
      phi[3] = X[0] * X[1];
      phi[4] = X[1] * X[1];
      break;
    default:
      phi[0] = X[0];
      phi[1] = X[1];
      phi[2] = X[2];
      phi[3] = X[0] * X[0];
      phi[4] = X[1] * X[1];
      phi[5] = X[2] * X[2];
      phi[6] = X[0] * X[1];
      phi[7] = X[0] * X[2];
      phi[8] = X[1] * X[2];
      break;
  }
}

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Pseudo-inverse of a full-column-rank matrix, or throw.
Matrix checked_pinv(const Matrix& m, std::size_t cell) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || !(s(s.size() - 1) > 1e-12 * s(0))) {
    std::ostringstream os;
    os << "rank-deficient reconstruction stencil at cell " << cell;
    throw GeometryError(os.str());
  }
  Eigen::VectorXd inv = s.cwiseInverse();
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

}  // namespace

Reconstructor::Reconstructor(const MappedGrid& grid, ReconstructionOptions options)
    : grid_(&grid), opts_(options), dim_(grid.dim()), ncoeff_(num_coeffs(grid.dim())) {
  const Extents& e = grid.extents();
  const int r1 = dim_ > 1 ? 1 : 0, r2 = dim_ > 2 ? 1 : 0;
  for (int dk = -r2; dk <= r2; ++dk)
    for (int dj = -r1; dj <= r1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0 && dk == 0) continue;
        offsets_.push_back({di, dj, dk});
        neighbor_shift_.push_back(di * e.stride(0) + dj * e.stride(1) + dk * e.stride(2));
      }
  side_neighbors_.resize(2 * dim_);
  for (int a = 0; a < dim_; ++a)
    for (int s = 0; s < 2; ++s)
      for (int n = 0; n < nneighbors(); ++n)
        if (offsets_[n][a] == (s == 0 ? -1 : 1)) side_neighbors_[2 * a + s].push_back(n);

  inv_h_.assign(e.size(), 0.0);
  for (std::size_t c = 0; c < e.size(); ++c)
    inv_h_[c] = 1.0 / std::pow(grid.cell(c).volume, 1.0 / dim_);

  if (grid.is_uniform_cartesian()) {
    stencils_.resize(1);
    build_stencil(e.index(e.lo(0), e.lo(1), e.lo(2)), stencils_[0]);
  } else {
    stencils_.resize(e.size());
    e.for_each(1, [&](int i, int j, int k) {
      const std::size_t c = e.index(i, j, k);
      build_stencil(c, stencils_[c]);
    });
  }

  e.for_each(1, [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k);
    double lo = grid.cell(c).min_edge, hi = grid.cell(c).max_edge;
    for (auto s : neighbor_shift_) {
      lo = std::min(lo, grid.cell(c + s).min_edge);
      hi = std::max(hi, grid.cell(c + s).max_edge);
    }
    max_stretch_ = std::max(max_stretch_, hi / lo);
  });
  if (max_stretch_ > 10.0) {
    std::ostringstream os;
    os << "reconstruction stencils are highly stretched (edge ratio " << max_stretch_
       << "); accuracy may degrade";
    log_warn_once("stencil-stretch", os.str());
  }
}

void Reconstructor::build_stencil(std::size_t c, Stencil& s) const {
  const QuadratureRule moment = QuadratureRule::gauss(3);
  const Vec3 xc = grid_->cell(c).centroid;
  const double ih = inv_h_[c];
  auto average = [&](std::size_t cell, double* avg) {
    std::fill(avg, avg + ncoeff_, 0.0);
    double vol = 0.0;
    double phi[kMaxCoeffs];
    for (const auto& node : grid_->cell_quadrature(cell, moment)) {
      double X[3];
      for (int d = 0; d < 3; ++d) X[d] = (node.point[d] - xc[d]) * ih;
      monomials(X, phi);
      for (int k = 0; k < ncoeff_; ++k) avg[k] += node.weight * phi[k];
      vol += node.weight;
    }
    for (int k = 0; k < ncoeff_; ++k) avg[k] /= vol;
  };
  average(c, s.mean.data());

  const int nn = nneighbors();
  Matrix A(nn, ncoeff_);
  Eigen::VectorXd w(nn);
  for (int n = 0; n < nn; ++n) {
    const std::size_t cn = c + neighbor_shift_[n];
    double avg[kMaxCoeffs];
    average(cn, avg);
    for (int k = 0; k < ncoeff_; ++k) A(n, k) = avg[k] - s.mean[k];
    w(n) = 1.0 / (norm(grid_->cell(cn).centroid - xc) * ih);
  }
  const Matrix P = checked_pinv(w.asDiagonal() * A, c) * w.asDiagonal();
  for (int k = 0; k < ncoeff_; ++k)
    for (int n = 0; n < nn; ++n) s.central[k * nn + n] = P(k, n);

  for (int side = 0; side < 2 * dim_; ++side) {
    const auto& nb = side_neighbors_[side];
    const int m = static_cast<int>(nb.size());
    Matrix As(m, dim_);
    Eigen::VectorXd ws(m);
    for (int r = 0; r < m; ++r) {
      for (int k = 0; k < dim_; ++k) As(r, k) = A(nb[r], k);
      ws(r) = w(nb[r]);
    }
    const Matrix Ps = checked_pinv(ws.asDiagonal() * As, c) * ws.asDiagonal();
    double* dst = s.sided.data() + side * dim_ * m;
    for (int k = 0; k < dim_; ++k)
      for (int r = 0; r < m; ++r) dst[k * m + r] = Ps(k, r);
  }
}

void Reconstructor::central_fit(const double* q, std::size_t c, double* coeff) const {
  const Stencil& s = stencil(c);
  const int nn = nneighbors();
  double dq[kMaxNeighbors];
  for (int n = 0; n < nn; ++n) dq[n] = q[c + neighbor_shift_[n]] - q[c];
  for (int k = 0; k < ncoeff_; ++k) {
    double acc = 0.0;
    const double* row = s.central.data() + k * nn;
    for (int n = 0; n < nn; ++n) acc += row[n] * dq[n];
    coeff[k] = acc;
  }
}

void Reconstructor::reconstruct_cell(const double* q, std::size_t c, double* coeff, double scale,
                                     bool limit) const {
  const Stencil& s = stencil(c);
  const int nn = nneighbors();
  const double qc = q[c];
  double dq[kMaxNeighbors];
  double range = 0.0;
  for (int n = 0; n < nn; ++n) {
    dq[n] = q[c + neighbor_shift_[n]] - qc;
    range = std::max(range, dq[n] * dq[n]);
  }
  if (range == 0.0) {
    std::fill(coeff, coeff + ncoeff_, 0.0);
    return;
  }
  double opt[kMaxCoeffs];
  for (int k = 0; k < ncoeff_; ++k) {
    double acc = 0.0;
    const double* row = s.central.data() + k * nn;
    for (int n = 0; n < nn; ++n) acc += row[n] * dq[n];
    opt[k] = acc;
  }
  if (!limit) {
    std::copy(opt, opt + ncoeff_, coeff);
    return;
  }

  const int nsides = 2 * dim_;
  const double total = opts_.central_weight + nsides;
  const double d0 = opts_.central_weight / total, ds = 1.0 / total;
  // The h^2 term keeps the weights at their linear values near smooth
  // extrema and saddles, where every indicator is O(h^4).
  const double h = 1.0 / inv_h_[c];
  const double eps = 1e-6 * range + h * h * scale * scale + 1e-100;

  double g[6][3];
  double wsum_lin[3] = {0.0, 0.0, 0.0};
  double omega[6];
  for (int side = 0; side < nsides; ++side) {
    const auto& nb = side_neighbors_[side];
    const int m = static_cast<int>(nb.size());
    const double* P = s.sided.data() + side * dim_ * m;
    double is = 0.0;
    for (int k = 0; k < dim_; ++k) {
      double acc = 0.0;
      for (int r = 0; r < m; ++r) acc += P[k * m + r] * dq[nb[r]];
      g[side][k] = acc;
      wsum_lin[k] += acc;
      is += acc * acc;
    }
    const double t = is + eps;
    omega[side] = ds / (t * t);
  }

  double p0[kMaxCoeffs];
  for (int k = 0; k < ncoeff_; ++k) p0[k] = opt[k] / d0;
  for (int k = 0; k < dim_; ++k) p0[k] = (opt[k] - ds * wsum_lin[k]) / d0;
  double lin = 0.0, quad = 0.0;
  for (int k = 0; k < dim_; ++k) lin += p0[k] * p0[k];
  // Second derivatives in scaled coordinates: pure terms carry a factor 2.
  const int npure = dim_;
  for (int k = dim_; k < ncoeff_; ++k) {
    const double d2 = (k < dim_ + npure) ? 2.0 * p0[k] : p0[k];
    quad += d2 * d2;
  }
  const double t0 = lin + 13.0 / 12.0 * quad + eps;
  const double omega0 = d0 / (t0 * t0);

  double wsum = omega0;
  for (int side = 0; side < nsides; ++side) wsum += omega[side];
  const double inv = 1.0 / wsum;
  const double w0 = omega0 * inv;
  for (int k = 0; k < ncoeff_; ++k) coeff[k] = w0 * p0[k];
  for (int side = 0; side < nsides; ++side) {
    const double ws = omega[side] * inv;
    for (int k = 0; k < dim_; ++k) coeff[k] += ws * g[side][k];
  }
}

double Reconstructor::field_range(const double* q) const {
  const Extents& e = grid_->extents();
  double lo = q[e.index(e.lo(0), e.lo(1), e.lo(2))], hi = lo;
  e.for_each(e.ghost(), [&](int i, int j, int k) {
    const double v = q[e.index(i, j, k)];
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  });
  return hi - lo;
}

void Reconstructor::reconstruct(const double* q, double* out, std::size_t stride, int layers, bool limit) const {
  const double scale = limit ? field_range(q) : 0.0;
  grid_->extents().for_each(layers, [&](int i, int j, int k) {
    const std::size_t c = grid_->extents().index(i, j, k);
    reconstruct_cell(q, c, out + c * stride, scale, limit);
  });
}

void Reconstructor::basis(std::size_t c, const Vec3& x, double* phi) const {
  const Vec3& xc = grid_->cell(c).centroid;
  const double ih = inv_h_[c];
  const double X[3] = {(x[0] - xc[0]) * ih, (x[1] - xc[1]) * ih, (x[2] - xc[2]) * ih};
  monomials(X, phi);
  const Stencil& s = stencil(c);
  for (int k = 0; k < ncoeff_; ++k) phi[k] -= s.mean[k];
}

void Reconstructor::basis_gradient(std::size_t c, const Vec3& x, double* grad) const {
  const Vec3& xc = grid_->cell(c).centroid;
  const double ih = inv_h_[c];
  const double X[3] = {(x[0] - xc[0]) * ih, (x[1] - xc[1]) * ih, (x[2] - xc[2]) * ih};
  std::fill(grad, grad + dim_ * ncoeff_, 0.0);
  auto g = [&](int d, int k) -> double& { return grad[d * ncoeff_ + k]; };
  switch (dim_) {
    case 1:
      g(0, 0) = ih;
      g(0, 1) = 2.0 * X[0] * ih;
      break;
    case 2:
      g(0, 0) = ih;
      g(1, 1) = ih;
      g(0, 2) = 2.0 * X[0] * ih;
      g(0, 3) = X[1] * ih;
      g(1, 3) = X[0] * ih;
      g(1, 4) = 2.0 * X[1] * ih;
      break;
    default:
      g(0, 0) = ih;
      g(1, 1) = ih;
      g(2, 2) = ih;
      g(0, 3) = 2.0 * X[0] * ih;
      g(1, 4) = 2.0 * X[1] * ih;
      g(2, 5) = 2.0 * X[2] * ih;
      g(0, 6) = X[1] * ih;
      g(1, 6) = X[0] * ih;
      g(0, 7) = X[2] * ih;
      g(2, 7) = X[0] * ih;
      g(1, 8) = X[2] * ih;
      g(2, 8) = X[1] * ih;
      break;
  }
}

double Reconstructor::evaluate(std::size_t c, double qc, const double* coeff, const Vec3& x) const {
  double phi[kMaxCoeffs];
  basis(c, x, phi);
  double v = qc;
  for (int k = 0; k < ncoeff_; ++k) v += coeff[k] * phi[k];
  return v;
}

double Reconstructor::laplacian(std::size_t c, const double* coeff) const {
  double s;
  switch (dim_) {
    case 1: s = coeff[1]; break;
    case 2: s = coeff[2] + coeff[4]; break;
    default: s = coeff[3] + coeff[4] + coeff[5]; break;
  }
  return 2.0 * s * inv_h_[c] * inv_h_[c];
}

}  // namespace ctmhd
