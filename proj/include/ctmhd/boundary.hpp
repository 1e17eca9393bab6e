#pragma once

// Ghost-layer filling for the field block of fields.hpp.
//
// MHD variables and velocities: periodic copy, zeroth-order extrapolation
// (outflow) or frozen initial values (inflow). The potential is periodic up
// to a constant offset per axis, linearly extrapolated at outflow sides and
// at inflow sides follows the uniform inflow state, A(t) = A(0) + t (u x B).

#include <array>
#include <string>
#include <vector>

#include "ctmhd/geometry.hpp"

namespace ctmhd {

enum class BoundaryKind { Periodic, Outflow, Inflow };

BoundaryKind parse_boundary_kind(const std::string& name);
std::string to_string(BoundaryKind kind);

struct BoundaryConditions {
  // kind[axis][0] is the lower side, kind[axis][1] the upper side.
  std::array<std::array<BoundaryKind, 2>, 3> kind{};
  // Periodic axes: A(x + L e_axis) - A(x).
  std::array<Vec3, 3> a_offset{};

  static BoundaryConditions periodic();
  static BoundaryConditions outflow();
  void validate(const Extents& e) const;
};

class BoundaryFiller {
 public:
  BoundaryFiller(const Extents& extents, BoundaryConditions bc);

  const BoundaryConditions& conditions() const { return bc_; }

  /// Stores the values used by inflow sides (a full field block) and derives
  /// the potential drift u x B of each inflow side from its ghost cells.
  void set_inflow_state(std::vector<double> avg);

  /// Fills the ghost layers of variables [first, last) of a field block at time t.
  void fill(double* avg, int first, int last, double t = 0.0) const;

  /// Ghosts of a scalar cell field: periodic copy, otherwise nearest interior value.
  void fill_scalar(double* q) const;

 private:
  enum class Rule { Periodic, Copy, Frozen, Linear };
  void fill_axis(double* q, int axis, Rule lo, Rule hi, double offset, const double* frozen,
                 const double shift[2]) const;

  Extents ext_;
  BoundaryConditions bc_;
  std::vector<double> inflow_;
  std::array<std::array<Vec3, 2>, 3> drift_{};
};

}  // namespace ctmhd
