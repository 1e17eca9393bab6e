#pragma once

// Artificial-resistivity limiter: a per-cell diffusion coefficient
// eps = eta * alpha added to the potential update where the second
// derivative of A changes abruptly between neighbouring cells.

#include <array>
#include <cstddef>
#include <string>

#include "ctmhd/geometry.hpp"
#include "ctmhd/reconstruction.hpp"

namespace ctmhd {

enum class EtaMode { Advection, Mhd };

EtaMode parse_eta_mode(const std::string& name);

struct LimiterParams {
  bool enabled = true;
  double lambda_self = 1000.0;
  double lambda_nbr = 1.0;
  double e = 4.0;
  EtaMode eta_mode = EtaMode::Mhd;
  // eta = eta_scale * ds^2 / dt (advection) or eta_scale * ds (mhd).
  double eta_scale = 0.5;

  void validate() const;
};

/// sigma = lambda / (ds^4 + Sigma)^e
double smoothness_measure(double lambda, double ds, double Sigma, double e);

/// Ramp in [0, 1]: 0 for S <= sigma_ii, 1/2 [1 + sin(pi dS - pi/2)] for
/// 0 < dS = S - sigma_ii < 1, and 1 beyond.
double alpha_indicator(double S, double sigma_ii);

class Resistivity {
 public:
  Resistivity(const MappedGrid& grid, const Reconstructor& rec, LimiterParams params);

  const LimiterParams& params() const { return params_; }

  /// Indicator alpha of one cell from the polynomial coefficients of a
  /// scalar field (coeff[c * stride + k]).
  double alpha(const double* coeff, std::size_t stride, std::size_t c) const;

  /// eps for interior cells (ghost entries untouched). Uses the max alpha
  /// over the evolved A components. Returns the number of cells with eps > 0.
  std::size_t compute_epsilon(const double* coeff, const std::array<bool, 3>& evolve, double dt,
                              double* eps) const;

  /// Adds eps_c * <Laplace A>_c to rhs (A components, SoA) for interior cells;
  /// the Laplacian average comes from face-averaged normal derivatives.
  void apply(const double* coeff, const std::array<bool, 3>& evolve, const double* eps, double* rhs) const;

 private:
  const MappedGrid* grid_;
  const Reconstructor* rec_;
  LimiterParams params_;
};

}  // namespace ctmhd
