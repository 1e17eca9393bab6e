#pragma once

// Path-conservative operator for the vector potential in the Weyl gauge,
//   A_t + N1(u) A_x + N2(u) A_y + N3(u) A_z = 0,
// with straight-line-path Rusanov or FORCE fluctuations.

#include <array>
#include <cstddef>
#include <string>

#include "ctmhd/geometry.hpp"
#include "ctmhd/reconstruction.hpp"

namespace ctmhd {

enum class PotentialSolver { Rusanov, Force };

PotentialSolver parse_potential_solver(const std::string& name);

/// N_d(u) = u_d I - e_d u^T.
Mat3 coefficient_matrix(int d, const Vec3& u);
/// M(n, u) = sum_d n_d N_d(u) = (n.u) I - n u^T.
Mat3 directional_matrix(const Vec3& n, const Vec3& u);

struct PathMatrix {
  Mat3 A{};
  double alpha = 0.0;
};

/// Straight-line path average of M(n, u) between the traces, with the local
/// speed bound alpha = max(|u-.n|, |u+.n|, alpha_floor).
PathMatrix path_matrix(const Vec3& um, const Vec3& up, const Vec3& n, double alpha_floor = 0.0);

struct PotentialFluctuations {
  Vec3 minus{};
  Vec3 plus{};
};

PotentialFluctuations rusanov_fluctuations(const Vec3& dA, const PathMatrix& pm);
PotentialFluctuations force_fluctuations(const Vec3& dA, const PathMatrix& pm, double dx, double dt);

struct PotentialOptions {
  PotentialSolver solver = PotentialSolver::Rusanov;
  // Components of A that are evolved; the others get a zero right-hand side.
  std::array<bool, 3> evolve{true, true, true};
  // Uniform field carried by potential gradients along directions the grid
  // does not resolve (B1 of a 1D run). Adds u x background to A_t.
  Vec3 background{0.0, 0.0, 0.0};
};

class PotentialOperator {
 public:
  PotentialOperator(const MappedGrid& grid, const Reconstructor& rec, PotentialOptions options = {});

  const PotentialOptions& options() const { return opts_; }

  /// rhs[d * ncell + c] = -(1/|C|)[face fluctuations + volume term] for the
  /// interior cells. avg/coeff follow the layout in fields.hpp; dt is the
  /// frozen step size (used by the alpha floor and by FORCE).
  void apply(const double* avg, const double* coeff, double dt, double* rhs) const;

 private:
  const MappedGrid* grid_;
  const Reconstructor* rec_;
  PotentialOptions opts_;
};

}  // namespace ctmhd
