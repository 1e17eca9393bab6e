#pragma once

// SSP-RK3 driver with the per-stage constrained-transport sequence:
//   predictor   Q_mhd^(k*) and Q_A^(k) from convex-combination Euler steps,
//               with the velocity taken from Q_mhd^(k-1);
//   corrector   B^(k) = curl(Q_A^(k)); rho, rho u and E are kept.

#include <array>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "ctmhd/boundary.hpp"
#include "ctmhd/curl.hpp"
#include "ctmhd/mhd.hpp"
#include "ctmhd/potential.hpp"
#include "ctmhd/problems.hpp"
#include "ctmhd/reconstruction.hpp"
#include "ctmhd/resistivity.hpp"

namespace ctmhd {

struct SolverOptions {
  double cfl = 0.5;
  double t_final = 1.0;
  long max_steps = 100000000;
  double dt = 0.0;  // > 0: fixed step size instead of the CFL rule
  double dt_max = std::numeric_limits<double>::infinity();
  bool corrector = true;
  bool ct25d_full = false;
  bool weno = true;  // CWENO limiting of the MHD variables
  PotentialSolver potential_solver = PotentialSolver::Rusanov;
  LimiterParams limiter;
  int time_order = 3;  // 3: SSP-RK3, 1: forward Euler
  // > 0: face traces keep rho and p above this fraction of the cell mean.
  double positivity_floor = 0.0;

  /// Defaults taken from a problem (CFL, final time, limiter, 2.5D mode).
  static SolverOptions for_problem(const ProblemSetup& p);
};

struct StageCoefficients {
  double alpha;
  double beta;
};
inline constexpr std::array<StageCoefficients, 3> kSspRk3{{{1.0, 1.0}, {0.75, 0.25}, {1.0 / 3.0, 2.0 / 3.0}}};

struct Diagnostics {
  long step = 0;
  double t = 0.0;
  double dt = 0.0;
  double mass = 0.0;
  Vec3 momentum{};
  double energy = 0.0;
  Vec3 field{};
  DivergenceStats div;
  double min_rho = 0.0;
  double min_p = 0.0;
  std::size_t limited_cells = 0;  // cells with eps > 0 in the last stage
};

class Simulation {
 public:
  Simulation(ProblemSetup problem, SolverOptions options);
  ~Simulation();

  const ProblemSetup& problem() const { return problem_; }
  const SolverOptions& options() const { return opts_; }
  const MappedGrid& grid() const { return *grid_; }
  const Reconstructor& reconstructor() const { return *rec_; }
  double time() const { return t_; }
  long steps() const { return steps_; }

  /// Field block (fields.hpp layout, ghosts filled).
  const std::vector<double>& fields() const { return q_; }
  /// Replace the field block; ghosts are refilled.
  void set_fields(std::vector<double> q);

  /// A components evolved and B components overwritten by the corrector.
  const std::array<bool, 3>& evolved() const { return evolve_; }
  const std::array<bool, 3>& corrected() const { return correct_; }

  /// CFL step from the current state (not truncated to t_final).
  double compute_dt() const;

  /// One stage: out = a qn + (1 - a) prev + b dt L(prev), then the corrector.
  /// The u slots of prev are refreshed from its MHD state.
  void stage(const std::vector<double>& qn, std::vector<double>& prev, StageCoefficients c, double dt,
             std::vector<double>& out);

  /// One full time step of size dt.
  void step(double dt);

  /// Steps until t_final (or max_steps); the observer sees every step.
  Diagnostics advance(const std::function<void(const Diagnostics&)>& observer = {});

  Diagnostics diagnostics() const;

  /// Ghost filling (at time t), the velocity slots and the curl corrector on a block.
  void fill_ghosts(std::vector<double>& q, double t) const;
  void update_velocity(std::vector<double>& q);
  void apply_corrector(std::vector<double>& q);

 private:
  void reconstruct(const std::vector<double>& q, int first, int last, bool limit);

  ProblemSetup problem_;
  SolverOptions opts_;
  std::unique_ptr<MappedGrid> grid_;
  std::unique_ptr<Reconstructor> rec_;
  std::unique_ptr<MhdOperator> mhd_;
  std::unique_ptr<PotentialOperator> pot_;
  std::unique_ptr<Resistivity> res_;
  std::unique_ptr<CurlOperator> curl_;
  std::unique_ptr<BoundaryFiller> bnd_;
  std::array<bool, 3> evolve_{};
  std::array<bool, 3> correct_{};

  std::vector<double> q_, qn_, qs_, coeff_, rhs_, eps_, scratch_;
  double t_ = 0.0;
  long steps_ = 0;
  double last_dt_ = 0.0;
  double stage_time_ = 0.0;  // time level of the stage being computed
  std::size_t limited_ = 0;
};

/// Cell averages of the problem's initial data (5-point Gauss per direction)
/// into a field block, including ghost cells.
std::vector<double> initial_fields(const ProblemSetup& p, const MappedGrid& grid);

/// Cell averages of the exact solution at time t (interior cells only).
std::vector<double> exact_fields(const ProblemSetup& p, const MappedGrid& grid, double t);

}  // namespace ctmhd
