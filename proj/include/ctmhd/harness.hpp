#pragma once

// Run configuration, error measurement, convergence studies, the fine 1D
// shock-tube reference and file output.

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ctmhd/timestepper.hpp"

namespace ctmhd {

/// `key = value` lines; `#` starts a comment; keys are case sensitive.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& source = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return values_; }

  std::string get(const std::string& key) const;  // throws ConfigError naming the key
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

 private:
  std::string source_;
  std::map<std::string, std::string> values_;
};

/// Every key understood by run_spec.
const std::vector<std::string>& config_keys();

struct RunSpec {
  ProblemSetup problem;
  SolverOptions options;
  std::string output_dir;       // empty: no files
  long output_every = 0;        // snapshot period in steps; 0: final state only
  std::vector<std::string> formats{"csv", "vtk"};
  int levels = 3;               // converge: number of grids
  int reference_cells = 10000;  // reference: 1D cells
};

/// Builds the problem and solver options; problem defaults are overridden by
/// the keys present. Unknown keys and malformed values throw ConfigError.
RunSpec run_spec(const Config& cfg);

// ---- errors and convergence ------------------------------------------------

inline constexpr int kNumErrorFields = 11;
/// rho, rho u1..3, E, B1..3, A1..3 (field block variables 0..10).
const std::array<std::string, kNumErrorFields>& error_labels();
using ErrorRow = std::array<double, kNumErrorFields>;

/// sum |C| |Q - Q_exact| / sum |C| over interior cells, per variable.
ErrorRow l1_errors(const MappedGrid& grid, const std::vector<double>& q, const std::vector<double>& exact);

double eoc(double coarse, double fine);

struct ConvergenceReport {
  std::vector<std::string> grids;
  std::vector<ErrorRow> errors;

  /// EOC between consecutive grids (one row fewer than errors).
  std::vector<ErrorRow> eocs() const;
  /// Errors per grid, then EOC rows, one column per quantity.
  std::string table() const;
};

/// Runs `levels` grids, doubling the base resolution in every active
/// direction, and measures L1 errors against the exact solution at t_final.
ConvergenceReport run_convergence(const RunSpec& base, int levels,
                                  const std::function<void(const std::string&)>& progress = {});

// ---- 1D profiles -----------------------------------------------------------

struct Profile {
  std::vector<double> x, rho, p, b1, b2, b3;

  /// Linear interpolation of a column at x (clamped at the ends).
  double sample(const std::vector<double>& column, double x0) const;
};

/// Cell-centroid profile of a simulation; in 2D/3D every interior cell is one
/// scatter point.
Profile profile_of(const Simulation& sim);

/// Fine-grid solution of the 1D shock tube at its final time.
Profile reference_profile(int cells, const SolverOptions* options = nullptr);

/// sum |C| |B1 - B1_ref(x_c)| / sum |C| for a shock-tube simulation.
double b1_error_vs_reference(const Simulation& sim, const Profile& ref);

/// Cell-average derivative of a 1D potential component from the averaged face
/// traces: d_i = (tr_{i+1/2} - tr_{i-1/2}) / dx, tr = (q- + q+) / 2.
std::vector<double> trace_derivative(const Simulation& sim, int component);

// ---- output ----------------------------------------------------------------

void write_csv(const Simulation& sim, const std::string& path);
void write_vtk(const Simulation& sim, const std::string& path);
/// Whitespace-separated `x value` scatter files <prefix>_<var>.dat for rho, p and B1..3.
void write_curves(const Simulation& sim, const std::string& prefix);
/// Writes every requested format as <dir>/<stem>.<ext>.
void write_snapshot(const Simulation& sim, const std::string& dir, const std::string& stem,
                    const std::vector<std::string>& formats);

}  // namespace ctmhd
