#include "ctmhd/boundary.hpp"

#include "ctmhd/fields.hpp"
#include "ctmhd/mhd.hpp"

namespace ctmhd {

BoundaryKind parse_boundary_kind(const std::string& name) {
  if (name == "periodic") return BoundaryKind::Periodic;
  if (name == "outflow") return BoundaryKind::Outflow;
  if (name == "inflow") return BoundaryKind::Inflow;
  throw ConfigError("unknown boundary kind '" + name + "' (expected periodic, outflow or inflow)");
}

std::string to_string(BoundaryKind kind) {
  switch (kind) {
    case BoundaryKind::Periodic: return "periodic";
    case BoundaryKind::Outflow: return "outflow";
    case BoundaryKind::Inflow: return "inflow";
  }
  return "?";
}

BoundaryConditions BoundaryConditions::periodic() {
  BoundaryConditions bc;
  for (auto& side : bc.kind) side = {BoundaryKind::Periodic, BoundaryKind::Periodic};
  return bc;
}

BoundaryConditions BoundaryConditions::outflow() {
  BoundaryConditions bc;
  for (auto& side : bc.kind) side = {BoundaryKind::Outflow, BoundaryKind::Outflow};
  return bc;
}

void BoundaryConditions::validate(const Extents& e) const {
  for (int d = 0; d < e.dim(); ++d) {
    if ((kind[d][0] == BoundaryKind::Periodic) != (kind[d][1] == BoundaryKind::Periodic))
      throw ConfigError("periodic boundaries must be set on both sides of an axis");
    if (e.cells(d) < e.ghost())
      throw ConfigError("each active axis needs at least " + std::to_string(e.ghost()) + " cells");
  }
}

BoundaryFiller::BoundaryFiller(const Extents& extents, BoundaryConditions bc) : ext_(extents), bc_(bc) {
  bc_.validate(ext_);
}

void BoundaryFiller::set_inflow_state(std::vector<double> avg) {
  inflow_ = std::move(avg);
  const std::size_t ncell = ext_.size();
  for (int axis = 0; axis < ext_.dim(); ++axis)
    for (int s = 0; s < 2; ++s) {
      int idx[3] = {ext_.lo(0), ext_.lo(1), ext_.lo(2)};
      idx[axis] = s == 0 ? ext_.lo(axis) - 1 : ext_.hi(axis);
      const std::size_t c = ext_.index(idx[0], idx[1], idx[2]);
      const double rho = inflow_[c];
      if (!(rho > 0.0)) continue;
      Vec3 u, b;
      for (int d = 0; d < 3; ++d) {
        u[d] = inflow_[(kMx + d) * ncell + c] / rho;
        b[d] = inflow_[(kBx + d) * ncell + c];
      }
      drift_[axis][s] = cross(u, b);
    }
}

void BoundaryFiller::fill_axis(double* q, int axis, Rule lo_rule, Rule hi_rule, double offset,
                               const double* frozen, const double shift[2]) const {
  const int dim = ext_.dim();
  const int g = ext_.ghost();
  int from[3], to[3];
  for (int d = 0; d < 3; ++d) {
    const int gd = (d < dim && d < axis) ? g : 0;
    from[d] = ext_.lo(d) - gd;
    to[d] = ext_.hi(d) + gd;
  }
  const int lo = ext_.lo(axis), hi = ext_.hi(axis), n = hi - lo;
  const std::ptrdiff_t st = ext_.stride(axis);
  from[axis] = lo;
  to[axis] = lo + 1;
  for (int k = from[2]; k < to[2]; ++k)
    for (int j = from[1]; j < to[1]; ++j)
      for (int i = from[0]; i < to[0]; ++i) {
        const std::size_t first = ext_.index(i, j, k);  // first interior cell along axis
        const std::size_t last = first + (n - 1) * st;
        for (int m = 1; m <= g; ++m) {
          const std::size_t gl = first - m * st, gh = last + m * st;
          switch (lo_rule) {
            case Rule::Periodic: q[gl] = q[last - (m - 1) * st] - offset; break;
            case Rule::Copy: q[gl] = q[first]; break;
            case Rule::Frozen: q[gl] = frozen[gl] + shift[0]; break;
            case Rule::Linear: q[gl] = q[first] + m * (q[first] - q[first + st]); break;
          }
          switch (hi_rule) {
            case Rule::Periodic: q[gh] = q[first + (m - 1) * st] + offset; break;
            case Rule::Copy: q[gh] = q[last]; break;
            case Rule::Frozen: q[gh] = frozen[gh] + shift[1]; break;
            case Rule::Linear: q[gh] = q[last] + m * (q[last] - q[last - st]); break;
          }
        }
      }
}

void BoundaryFiller::fill(double* avg, int first, int last, double t) const {
  const std::size_t ncell = ext_.size();
  for (int v = first; v < last; ++v) {
    const bool potential = v >= kVarA && v < kVarA + 3;
    double* q = avg + v * ncell;
    const double* frozen = inflow_.empty() ? nullptr : inflow_.data() + v * ncell;
    for (int axis = 0; axis < ext_.dim(); ++axis) {
      Rule rule[2] = {Rule::Copy, Rule::Copy};
      double shift[2] = {0.0, 0.0};
      for (int s = 0; s < 2; ++s) {
        switch (bc_.kind[axis][s]) {
          case BoundaryKind::Periodic: rule[s] = Rule::Periodic; break;
          case BoundaryKind::Outflow: rule[s] = potential ? Rule::Linear : Rule::Copy; break;
          case BoundaryKind::Inflow:
            if (!frozen) throw ConfigError("inflow boundary used without an inflow state");
            rule[s] = Rule::Frozen;
            if (potential) shift[s] = t * drift_[axis][s][v - kVarA];
            break;
        }
      }
      const double offset = potential ? bc_.a_offset[axis][v - kVarA] : 0.0;
      fill_axis(q, axis, rule[0], rule[1], offset, frozen, shift);
    }
  }
}

void BoundaryFiller::fill_scalar(double* q) const {
  for (int axis = 0; axis < ext_.dim(); ++axis) {
    const Rule lo = bc_.kind[axis][0] == BoundaryKind::Periodic ? Rule::Periodic : Rule::Copy;
    const Rule hi = bc_.kind[axis][1] == BoundaryKind::Periodic ? Rule::Periodic : Rule::Copy;
    const double shift[2] = {0.0, 0.0};
    fill_axis(q, axis, lo, hi, 0.0, nullptr, shift);
  }
}

}  // namespace ctmhd
