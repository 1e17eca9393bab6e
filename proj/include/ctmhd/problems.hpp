#pragma once

// Built-in test problems: initial data, boundary rules, exact solutions where
// known, and per-problem solver defaults.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ctmhd/boundary.hpp"
#include "ctmhd/geometry.hpp"
#include "ctmhd/mhd.hpp"
#include "ctmhd/resistivity.hpp"

namespace ctmhd {

enum class ProblemMode { Mhd, Advection };

struct ProblemSetup {
  std::string name;
  ProblemMode mode = ProblemMode::Mhd;
  GridDescriptor grid;
  BoundaryConditions bc;

  // Pointwise initial data: primitive state and vector potential.
  std::function<Primitive(const Vec3&)> state;
  std::function<Vec3(const Vec3&)> potential;
  // Advection mode: prescribed velocity carried in the u slots.
  std::function<Vec3(const Vec3&)> velocity;

  // Exact solution at time t, when known.
  std::function<Primitive(const Vec3&, double)> exact_state;
  std::function<Vec3(const Vec3&, double)> exact_potential;

  double t_final = 1.0;
  double cfl = 0.5;
  bool ct25d_full = false;
  double positivity_floor = 0.0;
  LimiterParams limiter;
};

struct ProblemParams {
  std::array<int, 3> cells{0, 0, 0};  // 0: problem default
  std::optional<GridKind> grid;       // unset: problem default
  std::optional<double> beta;
};

std::vector<std::string> problem_names();

/// Throws ConfigError for an unknown name.
ProblemSetup make_problem(const std::string& name, const ProblemParams& params = {});

/// Shock-tube left and right states.
Primitive shock_tube_left();
Primitive shock_tube_right();

/// Propagation angle of the 2.5D Alfven wave, atan(1/2).
double alfven_angle();

}  // namespace ctmhd
