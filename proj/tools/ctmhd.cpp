// Command-line driver: run a problem, a convergence study, or the fine 1D
// shock-tube reference from a key = value config file.
//
// Exit status: 0 ok, 1 other failure, 2 bad configuration, 3 lost positivity.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ctmhd/harness.hpp"
#include "ctmhd/log.hpp"

using namespace ctmhd;

namespace {

Config load_config(const std::string& path, const std::vector<std::string>& overrides) {
  Config cfg = Config::load(path);
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + o + "'");
    cfg.set(o.substr(0, eq), o.substr(eq + 1));
  }
  return cfg;
}

void print_diagnostics(const Diagnostics& d) {
  fmt::print("step {:6d}  t {:.6f}  dt {:.3e}  min rho {:.4e}  min p {:.4e}  max|div B| {:.3e}\n", d.step, d.t, d.dt,
             d.min_rho, d.min_p, d.div.max);
}

int run(const RunSpec& spec) {
  Simulation sim(spec.problem, spec.options);
  const bool files = !spec.output_dir.empty();
  long snap = 0;
  auto snapshot = [&] {
    write_snapshot(sim, spec.output_dir, fmt::format("{}_{:04d}", spec.problem.name, snap++), spec.formats);
  };
  if (files && spec.output_every > 0) snapshot();
  print_diagnostics(sim.diagnostics());
  const long every = spec.output_every > 0 ? spec.output_every : 0;
  const Diagnostics d = sim.advance([&](const Diagnostics& x) {
    if (log_level() >= LogLevel::Info) print_diagnostics(x);
    if (files && every > 0 && x.step % every == 0) snapshot();
  });
  print_diagnostics(d);
  if (files && (every == 0 || d.step % every != 0)) snapshot();
  return 0;
}

int converge(const RunSpec& spec) {
  const auto rep = run_convergence(spec, spec.levels, [](const std::string& m) { fmt::print("{}\n", m); });
  const std::string table = rep.table();
  fmt::print("{}", table);
  if (!spec.output_dir.empty()) {
    std::filesystem::create_directories(spec.output_dir);
    std::ofstream((std::filesystem::path(spec.output_dir) / (spec.problem.name + "_convergence.txt")).string())
        << table;
  }
  return 0;
}

int reference(const RunSpec& spec) {
  ProblemParams prm;
  prm.cells = {spec.reference_cells, 0, 0};
  ProblemSetup p = make_problem("shocktube1d", prm);
  SolverOptions o = spec.options;
  Simulation sim(p, o);
  sim.advance();
  print_diagnostics(sim.diagnostics());
  const std::string dir = spec.output_dir.empty() ? "." : spec.output_dir;
  std::filesystem::create_directories(dir);
  write_curves(sim, (std::filesystem::path(dir) / fmt::format("reference_{}", spec.reference_cells)).string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-volume MHD with unstaggered constrained transport"};
  app.require_subcommand(1);
  std::string config;
  std::vector<std::string> overrides;

  auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "key = value config file")->required()->check(CLI::ExistingFile);
    sub->add_option("-s,--set", overrides, "override a config entry, key=value");
    return sub;
  };
  auto* run_cmd = add("run", "advance one problem to its final time");
  auto* conv_cmd = add("converge", "L1 errors and convergence orders on successively doubled grids");
  auto* ref_cmd = add("reference", "fine-grid 1D shock-tube profiles");
  auto* list_cmd = app.add_subcommand("problems", "list the built-in problems");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) {
      for (const auto& n : problem_names()) fmt::print("{}\n", n);
      return 0;
    }
    Config cfg = load_config(config, overrides);
    // The reference run builds its own problem; a problem key is optional there.
    if (ref_cmd->parsed() && !cfg.has("problem")) cfg.set("problem", "shocktube1d");
    const RunSpec spec = run_spec(cfg);
    if (run_cmd->parsed()) return run(spec);
    if (conv_cmd->parsed()) return converge(spec);
    return reference(spec);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const PositivityError& e) {
    std::fprintf(stderr, "positivity lost: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
