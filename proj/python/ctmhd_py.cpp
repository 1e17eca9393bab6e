// Python bindings: build problems, run simulations, read fields as numpy arrays.

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ctmhd/fields.hpp"
#include "ctmhd/harness.hpp"
#include "ctmhd/log.hpp"

namespace py = pybind11;
using namespace ctmhd;

namespace {

py::dict to_dict(const Diagnostics& d) {
  py::dict r;
  r["step"] = d.step;
  r["t"] = d.t;
  r["dt"] = d.dt;
  r["mass"] = d.mass;
  r["momentum"] = d.momentum;
  r["energy"] = d.energy;
  r["field"] = d.field;
  r["div_max"] = d.div.max;
  r["div_l1"] = d.div.l1;
  r["min_rho"] = d.min_rho;
  r["min_p"] = d.min_p;
  r["limited_cells"] = d.limited_cells;
  return r;
}

// Interior cells of an SoA block as an array of shape (nvar, nz, ny, nx).
py::array_t<double> interior(const Extents& e, const std::vector<double>& q, int first, int count) {
  const int nx = e.cells(0), ny = e.cells(1), nz = e.cells(2);
  py::array_t<double> out({count, nz, ny, nx});
  auto a = out.mutable_unchecked<4>();
  for (int v = 0; v < count; ++v)
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
          a(v, k, j, i) = q[(first + v) * e.size() + e.index(e.lo(0) + i, e.lo(1) + j, e.lo(2) + k)];
  return out;
}

py::dict errors(const Simulation& s) {
  const ErrorRow r = l1_errors(s.grid(), s.fields(), exact_fields(s.problem(), s.grid(), s.time()));
  py::dict d;
  for (int v = 0; v < kNumErrorFields; ++v) d[py::str(error_labels()[v])] = r[v];
  return d;
}

}  // namespace

PYBIND11_MODULE(ctmhd, m) {
  m.doc() = "Finite-volume ideal MHD with unstaggered constrained transport";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<PositivityError>(m, "PositivityError", PyExc_ArithmeticError);

  m.def("problem_names", &problem_names);
  m.def("set_log_level", [](const std::string& level) {
    if (level == "quiet") set_log_level(LogLevel::Quiet);
    else if (level == "warn") set_log_level(LogLevel::Warn);
    else if (level == "info") set_log_level(LogLevel::Info);
    else throw ConfigError("log level must be quiet, warn or info, got '" + level + "'");
  });

  py::class_<ProblemSetup>(m, "Problem")
      .def_readonly("name", &ProblemSetup::name)
      .def_readonly("t_final", &ProblemSetup::t_final)
      .def_property_readonly("dim", [](const ProblemSetup& p) { return p.grid.dim; })
      .def_property_readonly("cells", [](const ProblemSetup& p) { return p.grid.cells; })
      .def_property_readonly("grid", [](const ProblemSetup& p) { return to_string(p.grid.kind); })
      .def("__repr__", [](const ProblemSetup& p) { return "<Problem " + p.name + ">"; });

  m.def(
      "make_problem",
      [](const std::string& name, std::array<int, 3> cells, std::optional<std::string> grid,
         std::optional<double> beta) {
        ProblemParams prm;
        prm.cells = cells;
        if (grid) prm.grid = parse_grid_kind(*grid);
        prm.beta = beta;
        return make_problem(name, prm);
      },
      py::arg("name"), py::arg("cells") = std::array<int, 3>{0, 0, 0}, py::arg("grid") = py::none(),
      py::arg("beta") = py::none());

  py::class_<SolverOptions>(m, "Options")
      .def(py::init<>())
      .def_static("for_problem", &SolverOptions::for_problem)
      .def_readwrite("cfl", &SolverOptions::cfl)
      .def_readwrite("t_final", &SolverOptions::t_final)
      .def_readwrite("dt", &SolverOptions::dt)
      .def_readwrite("max_steps", &SolverOptions::max_steps)
      .def_readwrite("corrector", &SolverOptions::corrector)
      .def_readwrite("ct25d_full", &SolverOptions::ct25d_full)
      .def_readwrite("weno", &SolverOptions::weno)
      .def_readwrite("time_order", &SolverOptions::time_order)
      .def_readwrite("positivity_floor", &SolverOptions::positivity_floor)
      .def_property(
          "limiter", [](const SolverOptions& o) { return o.limiter.enabled; },
          [](SolverOptions& o, bool on) { o.limiter.enabled = on; })
      .def_property(
          "potential_solver",
          [](const SolverOptions& o) { return o.potential_solver == PotentialSolver::Force ? "force" : "rusanov"; },
          [](SolverOptions& o, const std::string& s) {
            if (s == "rusanov") o.potential_solver = PotentialSolver::Rusanov;
            else if (s == "force") o.potential_solver = PotentialSolver::Force;
            else throw ConfigError("potential solver must be rusanov or force, got '" + s + "'");
          });

  py::class_<Simulation>(m, "Simulation")
      .def(py::init([](const ProblemSetup& p, std::optional<SolverOptions> o) {
             return std::make_unique<Simulation>(p, o ? *o : SolverOptions::for_problem(p));
           }),
           py::arg("problem"), py::arg("options") = py::none())
      .def_property_readonly("time", &Simulation::time)
      .def_property_readonly("steps", &Simulation::steps)
      .def_property_readonly("problem", &Simulation::problem)
      .def_property_readonly("options", &Simulation::options)
      .def("compute_dt", &Simulation::compute_dt)
      .def("step", &Simulation::step, py::arg("dt"), py::call_guard<py::gil_scoped_release>())
      .def(
          "advance",
          [](Simulation& s, std::function<void(py::dict)> cb) {
            if (!cb) {
              Diagnostics d;
              {
                py::gil_scoped_release nogil;
                d = s.advance();
              }
              return to_dict(d);
            }
            return to_dict(s.advance([&](const Diagnostics& d) { cb(to_dict(d)); }));
          },
          py::arg("callback") = nullptr)
      .def("diagnostics", [](const Simulation& s) { return to_dict(s.diagnostics()); })
      .def("conserved", [](const Simulation& s) { return interior(s.grid().extents(), s.fields(), 0, kNumMhd); })
      .def("potential", [](const Simulation& s) { return interior(s.grid().extents(), s.fields(), kVarA, 3); })
      .def("velocity", [](const Simulation& s) { return interior(s.grid().extents(), s.fields(), kVarU, 3); })
      .def("centroids",
           [](const Simulation& s) {
             const Extents& e = s.grid().extents();
             std::vector<double> c(3 * e.size(), 0.0);
             e.for_each(0, [&](int i, int j, int k) {
               const std::size_t n = e.index(i, j, k);
               for (int d = 0; d < 3; ++d) c[d * e.size() + n] = s.grid().cell(n).centroid[d];
             });
             return interior(e, c, 0, 3);
           })
      .def("errors", &errors, "L1 errors against the exact solution at the current time")
      .def("write", &write_snapshot, py::arg("dir"), py::arg("stem"),
           py::arg("formats") = std::vector<std::string>{"csv"});

  m.def(
      "run_config",
      [](const std::string& text) {
        const RunSpec s = run_spec(Config::parse(text));
        Simulation sim(s.problem, s.options);
        Diagnostics d;
        {
          py::gil_scoped_release nogil;
          d = sim.advance();
        }
        return to_dict(d);
      },
      py::arg("text"), "Run a key = value config to its final time; returns the final diagnostics");
  m.attr("error_labels") = error_labels();
}
