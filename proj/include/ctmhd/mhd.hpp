#pragma once

// Ideal MHD: state conversions, directional flux, wave speeds, the 8-wave
// eigensystem and f-wave interface fluctuations, plus the conservative
// finite-volume operator built from them.

#include <array>
#include <cstddef>
#include <limits>

#include "ctmhd/geometry.hpp"
#include "ctmhd/reconstruction.hpp"

namespace ctmhd {

inline constexpr int kNumMhd = 8;
enum MhdVar : int { kRho = 0, kMx = 1, kMy = 2, kMz = 3, kEnergy = 4, kBx = 5, kBy = 6, kBz = 7 };

using State = std::array<double, kNumMhd>;
using Matrix8 = std::array<std::array<double, kNumMhd>, kNumMhd>;

inline constexpr std::size_t kNoCell = std::numeric_limits<std::size_t>::max();

struct Primitive {
  double rho = 1.0;
  Vec3 u{0.0, 0.0, 0.0};
  double p = 1.0;
  Vec3 B{0.0, 0.0, 0.0};
};

/// Throws PositivityError (tagged with `cell`) if rho <= 0 or p <= 0.
Primitive primitive_from_conserved(const State& q, std::size_t cell = kNoCell);
State conserved_from_primitive(const Primitive& w);

/// F(q) . n
State flux(const Primitive& w, const Vec3& n);
State flux(const State& q, const Vec3& n);

struct WaveSpeeds {
  double a = 0.0;
  double ca = 0.0;
  double cs = 0.0;
  double cf = 0.0;
};
WaveSpeeds wave_speeds(const Primitive& w, const Vec3& n);

struct EigenSystem {
  std::array<double, kNumMhd> lambda{};
  Matrix8 R{};  // columns are right eigenvectors in conserved variables
  Matrix8 L{};  // rows are left eigenvectors
};

/// Eigen-decomposition of the Godunov-Powell flux Jacobian in direction n.
/// Waves are ordered fast-, Alfven-, slow-, entropy, divergence, slow+, Alfven+, fast+.
EigenSystem eigen_decomposition(const Primitive& w, const Vec3& n);

struct Fluctuations {
  State minus{};
  State plus{};
};

/// f-wave splitting of F(q+).n - F(q-).n using the arithmetic-mean state.
Fluctuations riemann_fluctuations(const State& qm, const State& qp, const Vec3& n,
                                  std::size_t cell = kNoCell);
/// Interface flux F(q-).n + A^- dq.
State interface_flux(const State& qm, const State& qp, const Vec3& n, std::size_t cell = kNoCell);

/// Orthonormal right-handed frame (n, t1, t2) used for the local eigensystem.
void local_frame(const Vec3& n, Vec3& t1, Vec3& t2);

/// Semi-discrete conservative operator for the 8 MHD unknowns.
///
/// q: structure-of-arrays cell averages, q[v * ncell + c].
/// coeff: reconstruction coefficients, coeff[(c * nvar + v) * ncoeff + k] for
///   v < kNumMhd (nvar is the caller's per-cell variable count).
/// rhs: receives dq/dt for interior cells, same layout as q.
class MhdOperator {
 public:
  MhdOperator(const MappedGrid& grid, const Reconstructor& rec);

  void apply(const double* q, const double* coeff, int nvar, double* rhs) const;

  /// Scales the MHD polynomial of each cell toward its mean until every face
  /// trace has rho >= floor * rho_avg and p >= floor * p_avg. Returns the
  /// number of cells touched. coeff layout as in apply.
  std::size_t limit_traces(const double* q, double* coeff, int nvar, double floor) const;

  /// Largest stable step for the given CFL number from cell averages.
  double stable_dt(const double* q, double cfl) const;

  /// Checks every interior and ghost cell average for admissibility.
  void check_admissible(const double* q) const;

 private:
  const MappedGrid* grid_;
  const Reconstructor* rec_;
};

}  // namespace ctmhd
