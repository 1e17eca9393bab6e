#include "ctmhd/resistivity.hpp"

#include <algorithm>
#include <cmath>

#include "ctmhd/fields.hpp"
#include "ctmhd/log.hpp"

namespace ctmhd {

EtaMode parse_eta_mode(const std::string& name) {
  if (name == "advection") return EtaMode::Advection;
  if (name == "mhd") return EtaMode::Mhd;
  throw ConfigError("unknown limiter.eta_mode '" + name + "' (expected advection or mhd)");
}

void LimiterParams::validate() const {
  if (!(lambda_nbr > 0.0) || !(lambda_self >= lambda_nbr))
    throw ConfigError("limiter weights must satisfy lambda_self >= lambda_nbr > 0");
  if (!(e >= 1.0)) throw ConfigError("limiter.e must be >= 1");
  if (!(eta_scale >= 0.0)) throw ConfigError("limiter.eta_scale must be non-negative");
}

double smoothness_measure(double lambda, double ds, double Sigma, double e) {
  const double ds2 = ds * ds;
  return lambda / std::pow(ds2 * ds2 + Sigma, e);
}

double alpha_indicator(double S, double sigma_ii) {
  if (!(S > sigma_ii)) return 0.0;
  const double dS = S - sigma_ii;
  if (dS >= 1.0) return 1.0;
  return 0.5 * (1.0 + std::sin(kPi * dS - 0.5 * kPi));
}

Resistivity::Resistivity(const MappedGrid& grid, const Reconstructor& rec, LimiterParams params)
    : grid_(&grid), rec_(&rec), params_(params) {
  params_.validate();
}

double Resistivity::alpha(const double* coeff, std::size_t stride, std::size_t c) const {
  const Extents& e = grid_->extents();
  const int dim = e.dim();
  auto Sigma = [&](std::size_t k) {
    const double lap = rec_->laplacian(k, coeff + k * stride);
    const double scale = dim == 1 ? grid_->cell(k).volume * grid_->cell(k).volume : grid_->cell(k).volume;
    const double s = lap * scale;
    return s * s;
  };
  const double ds = grid_->cell(c).min_edge;
  const double sigma_ii = smoothness_measure(params_.lambda_self, ds, Sigma(c), params_.e);
  double S = 0.0;
  const auto [i, j, k] = e.ijk(c);
  const int r1 = dim > 1 ? 1 : 0, r2 = dim > 2 ? 1 : 0;
  for (int dk = -r2; dk <= r2; ++dk)
    for (int dj = -r1; dj <= r1; ++dj)
      for (int di = -1; di <= 1; ++di) {
        if (di == 0 && dj == 0 && dk == 0) continue;
        const std::size_t n = e.index(i + di, j + dj, k + dk);
        S = std::max(S, smoothness_measure(params_.lambda_nbr, ds, Sigma(n), params_.e));
      }
  return alpha_indicator(S, sigma_ii);
}

std::size_t Resistivity::compute_epsilon(const double* coeff, const std::array<bool, 3>& evolve, double dt,
                                         double* eps) const {
  const Extents& e = grid_->extents();
  const int nc = rec_->ncoeff();
  const std::size_t stride = static_cast<std::size_t>(kNumFields) * nc;
  std::size_t active = 0;
  bool clamped = false;
  e.for_each(0, [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k);
    eps[c] = 0.0;
    if (!params_.enabled) return;
    double a = 0.0;
    for (int d = 0; d < 3; ++d)
      if (evolve[d]) a = std::max(a, alpha(coeff + (kVarA + d) * nc, stride, c));
    if (a == 0.0) return;
    const double ds = grid_->cell(c).min_edge;
    const double eta =
        params_.eta_mode == EtaMode::Advection ? params_.eta_scale * ds * ds / dt : params_.eta_scale * ds;
    double v = eta * a;
    const double bound = 0.5 * ds * ds / dt;
    if (v > bound) {
      v = bound;
      clamped = true;
    }
    eps[c] = v;
    ++active;
  });
  if (clamped)
    log_warn_once("resistivity-clamp",
                  "artificial resistivity exceeded the explicit diffusion bound eps dt / ds^2 <= 1/2 and was clamped");
  return active;
}

void Resistivity::apply(const double* coeff, const std::array<bool, 3>& evolve, const double* eps,
                        double* rhs) const {
  // eps_c times the cell average of Laplace(A): a potential linear in x, i.e. a
  // uniform B, is left untouched wherever eps varies.
  const Extents& e = grid_->extents();
  const std::size_t ncell = e.size();
  const int nc = rec_->ncoeff();
  const int dim = e.dim();
  for (int axis = 0; axis < dim; ++axis) {
    const std::ptrdiff_t st = e.stride(axis);
    for (int k = e.lo(2); k < e.hi(2) + (axis == 2 ? 1 : 0); ++k)
      for (int j = e.lo(1); j < e.hi(1) + (axis == 1 ? 1 : 0); ++j)
        for (int i = e.lo(0); i < e.hi(0) + (axis == 0 ? 1 : 0); ++i) {
          const std::size_t cu = e.index(i, j, k);
          const std::size_t cl = cu - st;
          const int idx[3] = {i, j, k};
          const double el = idx[axis] > e.lo(axis) ? eps[cl] : 0.0;
          const double eu = idx[axis] < e.hi(axis) ? eps[cu] : 0.0;
          if (el == 0.0 && eu == 0.0) continue;
          Vec3 flux{0.0, 0.0, 0.0};
          for (const FaceNode& node : grid_->face(axis, i, j, k).nodes) {
            double gl[3 * kMaxCoeffs], gu[3 * kMaxCoeffs];
            rec_->basis_gradient(cl, node.point, gl);
            rec_->basis_gradient(cu, node.point, gu);
            for (int a = 0; a < 3; ++a) {
              if (!evolve[a]) continue;
              const double* cfl = coeff + (cl * kNumFields + kVarA + a) * nc;
              const double* cfu = coeff + (cu * kNumFields + kVarA + a) * nc;
              double dn = 0.0;
              for (int d = 0; d < dim; ++d) {
                double sl = 0.0, su = 0.0;
                for (int m = 0; m < nc; ++m) {
                  sl += cfl[m] * gl[d * nc + m];
                  su += cfu[m] * gu[d * nc + m];
                }
                dn += 0.5 * (sl + su) * node.normal[d];
              }
              flux[a] += node.weight * dn;
            }
          }
          if (el != 0.0) {
            const double s = el / grid_->cell(cl).volume;
            for (int a = 0; a < 3; ++a) rhs[a * ncell + cl] += s * flux[a];
          }
          if (eu != 0.0) {
            const double s = eu / grid_->cell(cu).volume;
            for (int a = 0; a < 3; ++a) rhs[a * ncell + cu] -= s * flux[a];
          }
        }
  }
}

}  // namespace ctmhd
