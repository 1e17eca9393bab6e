#include <cmath>
#include <vector>

#include "ctmhd/boundary.hpp"
#include "ctmhd/mhd.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace ctmhd;
using namespace ctmhd::test;

namespace {

constexpr double kTwoPi = 2.0 * kPi;

// Overwrites every ghost cell of variable v with a sentinel.
void poison(const Extents& e, double* q) {
  e.for_each(e.ghost(), [&](int i, int j, int k) {
    if (!e.is_interior(i, j, k)) q[e.index(i, j, k)] = -1e30;
  });
}

double max_ghost_error(const Extents& e, const double* q, const std::vector<double>& ref) {
  double m = 0.0;
  e.for_each(e.ghost(), [&](int i, int j, int k) {
    const std::size_t c = e.index(i, j, k);
    m = std::max(m, std::abs(q[c] - ref[c]));
  });
  return m;
}

}  // namespace

TEST_CASE("boundary kind names") {
  CHECK(parse_boundary_kind("periodic") == BoundaryKind::Periodic);
  CHECK(parse_boundary_kind("inflow") == BoundaryKind::Inflow);
  CHECK(to_string(BoundaryKind::Outflow) == "outflow");
  CHECK_THROWS_AS(parse_boundary_kind("reflecting"), ConfigError);
}

TEST_CASE("boundary validation") {
  MappedGrid g(box({8, 8, 1}, 2));
  BoundaryConditions bc = BoundaryConditions::periodic();
  bc.kind[1][1] = BoundaryKind::Outflow;
  CHECK_THROWS_AS(BoundaryFiller(g.extents(), bc), ConfigError);
  MappedGrid thin(box({8, 1, 1}, 2));
  CHECK_THROWS_AS(BoundaryFiller(thin.extents(), BoundaryConditions::periodic()), ConfigError);
}

TEST_CASE("periodic ghosts reproduce a periodic field, corners included") {
  for (int dim = 1; dim <= 3; ++dim) {
    MappedGrid g(box({8, 6, 5}, dim));
    const Extents& e = g.extents();
    const std::size_t n = e.size();
    std::vector<double> q(kNumFields * n, 0.0);
    const Field f = [](const Vec3& x) {
      return std::sin(kTwoPi * x[0]) + std::cos(kTwoPi * x[1]) * std::sin(kTwoPi * x[2]) + 0.1;
    };
    const auto ref = averages(g, f);
    std::copy(ref.begin(), ref.end(), q.begin() + kRho * n);
    poison(e, q.data() + kRho * n);
    BoundaryFiller(e, BoundaryConditions::periodic()).fill(q.data(), kRho, kRho + 1);
    CHECK(max_ghost_error(e, q.data() + kRho * n, ref) < 1e-14);
  }
}

TEST_CASE("periodic potential ghosts carry the per-axis offset") {
  // A = (0, 0, 2x - 3y + sin) is periodic up to (2, -3) on the unit square.
  MappedGrid g(box({8, 8, 1}, 2));
  const Extents& e = g.extents();
  const std::size_t n = e.size();
  std::vector<double> q(kNumFields * n, 0.0);
  const Field a = [](const Vec3& x) { return 2.0 * x[0] - 3.0 * x[1] + std::sin(kTwoPi * x[1]); };
  const auto ref = averages(g, a);
  double* az = q.data() + (kVarA + 2) * n;
  std::copy(ref.begin(), ref.end(), az);
  poison(e, az);
  BoundaryConditions bc = BoundaryConditions::periodic();
  bc.a_offset[0] = {0.0, 0.0, 2.0};
  bc.a_offset[1] = {0.0, 0.0, -3.0};
  BoundaryFiller(e, bc).fill(q.data(), kVarA, kVarA + 3);
  CHECK(max_ghost_error(e, az, ref) < 1e-13);
}

TEST_CASE("outflow: MHD variables are copied, the potential is extrapolated linearly") {
  MappedGrid g(box({6, 5, 1}, 2));
  const Extents& e = g.extents();
  const std::size_t n = e.size();
  std::vector<double> q(kNumFields * n, 0.0);
  const Field lin = [](const Vec3& x) { return 1.0 + 0.5 * x[0] - 2.0 * x[1]; };
  const auto ref = averages(g, lin);
  for (int v : {int(kEnergy), kVarA + 1}) {
    std::copy(ref.begin(), ref.end(), q.begin() + v * n);
    poison(e, q.data() + v * n);
  }
  BoundaryFiller(e, BoundaryConditions::outflow()).fill(q.data(), 0, kNumFields);
  CHECK(max_ghost_error(e, q.data() + (kVarA + 1) * n, ref) < 1e-13);

  // Zeroth order: each ghost equals the nearest interior cell along the
  // filled axes (corners take the corner interior value).
  const double* en = q.data() + kEnergy * n;
  e.for_each(e.ghost(), [&](int i, int j, int k) {
    const int ii = std::clamp(i, e.lo(0), e.hi(0) - 1), jj = std::clamp(j, e.lo(1), e.hi(1) - 1);
    CHECK(en[e.index(i, j, k)] == ref[e.index(ii, jj, k)]);
  });
}

TEST_CASE("inflow sides hold the stored state") {
  MappedGrid g(box({6, 1, 1}, 1));
  const Extents& e = g.extents();
  const std::size_t n = e.size();
  std::vector<double> q(kNumFields * n, 0.0), frozen(kNumFields * n, 0.0);
  for (std::size_t c = 0; c < n; ++c) frozen[kRho * n + c] = 7.0;
  for (std::size_t c = 0; c < n; ++c) q[kRho * n + c] = 1.0 + c;
  BoundaryConditions bc = BoundaryConditions::outflow();
  bc.kind[0][0] = BoundaryKind::Inflow;
  BoundaryFiller f(e, bc);
  CHECK_THROWS_AS(f.fill(q.data(), kRho, kRho + 1), ConfigError);
  f.set_inflow_state(frozen);
  f.fill(q.data(), kRho, kRho + 1);
  CHECK(q[kRho * n + 0] == 7.0);
  CHECK(q[kRho * n + 1] == 7.0);
  CHECK(q[kRho * n + e.hi(0)] == q[kRho * n + e.hi(0) - 1]);
}

TEST_CASE("scalar ghosts") {
  MappedGrid g(box({5, 4, 1}, 2));
  const Extents& e = g.extents();
  std::vector<double> s(e.size(), -1.0);
  e.for_each(0, [&](int i, int j, int k) { s[e.index(i, j, k)] = 10.0 * i + j; });
  BoundaryConditions bc = BoundaryConditions::periodic();
  bc.kind[1] = {BoundaryKind::Outflow, BoundaryKind::Outflow};
  BoundaryFiller(e, bc).fill_scalar(s.data());
  // x periodic, y nearest-value.
  CHECK(s[e.index(e.lo(0) - 1, e.lo(1), 0)] == s[e.index(e.hi(0) - 1, e.lo(1), 0)]);
  CHECK(s[e.index(e.lo(0), e.hi(1) + 1, 0)] == s[e.index(e.lo(0), e.hi(1) - 1, 0)]);
  CHECK(s[e.index(e.hi(0) + 1, e.lo(1) - 2, 0)] == s[e.index(e.lo(0) + 1, e.lo(1), 0)]);
}
