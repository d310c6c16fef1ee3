#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "vortexpatch/dynamics.hpp"
#include "vortexpatch/elliptic.hpp"
#include "vortexpatch/errors.hpp"
#include "vortexpatch/grid.hpp"
#include "vortexpatch/maximizer.hpp"
#include "vortexpatch/stability.hpp"

namespace py = pybind11;
using namespace vpl;

namespace {

Field field_from_array(const Grid& grid, const py::array_t<double>& arr) {
  auto buf = arr.request();
  if (buf.ndim != 2 || buf.shape[0] != grid.ny() || buf.shape[1] != grid.nx())
    throw std::invalid_argument("field array must have shape (ny, nx)");
  py::array_t<double, py::array::c_style | py::array::forcecast> a(arr);
  const double* data = a.data();
  Field f(static_cast<std::size_t>(grid.nx()) * grid.ny());
  std::copy(data, data + f.size(), f.begin());
  return f;
}

py::array_t<double> array_from_field(const Grid& grid, const Field& f) {
  py::array_t<double> arr({grid.ny(), grid.nx()});
  std::copy(f.begin(), f.end(), arr.mutable_data());
  return arr;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "steady vortex patch energy maximization and 2D Euler stability experiments";

  py::register_exception<SolverFailure>(m, "SolverFailure");
  py::register_exception<ConvergenceFailure>(m, "ConvergenceFailure");
  py::register_exception<InfeasibleConstraint>(m, "InfeasibleConstraint");
  py::register_exception<InfeasiblePerturbation>(m, "InfeasiblePerturbation");
  py::register_exception<BlowUpError>(m, "BlowUpError");

  py::class_<Vec2>(m, "Vec2")
      .def(py::init<double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0)
      .def_readwrite("x", &Vec2::x)
      .def_readwrite("y", &Vec2::y);

  py::class_<Domain>(m, "Domain")
      .def_static("disk", &Domain::disk, py::arg("radius"), py::arg("center") = Vec2{0, 0})
      .def_static("annulus", &Domain::annulus, py::arg("inner"), py::arg("outer"),
                  py::arg("center") = Vec2{0, 0})
      .def_static("rectangle", &Domain::rectangle, py::arg("width"), py::arg("height"))
      .def("contains", &Domain::contains)
      .def("area", &Domain::area);

  py::class_<Grid>(m, "Grid")
      .def_property_readonly("nx", &Grid::nx)
      .def_property_readonly("ny", &Grid::ny)
      .def_property_readonly("h", &Grid::h)
      .def_property_readonly("cell_area", &Grid::cell_area)
      .def_property_readonly("interior_count", &Grid::interior_count)
      .def_property_readonly("mask", [](const Grid& g) {
        py::array_t<bool> arr({g.ny(), g.nx()});
        auto* data = arr.mutable_data();
        for (std::size_t c = 0; c < g.mask().size(); ++c) data[c] = g.mask()[c] != 0;
        return arr;
      });

  m.def("build_grid", &build_grid, py::arg("domain"), py::arg("resolution"));
  m.def("measure", [](const Grid& g, const py::array_t<double>& ind) {
    return measure(g, field_from_array(g, ind));
  });

  m.def("solve_stream", [](const Grid& g, const py::array_t<double>& omega) {
    return array_from_field(g, solve_stream(g, field_from_array(g, omega)));
  });
  m.def("velocity", [](const Grid& g, const py::array_t<double>& psi) {
    Velocity v = velocity(g, field_from_array(g, psi));
    return py::make_tuple(array_from_field(g, v.vx), array_from_field(g, v.vy));
  });
  m.def("energy", [](const Grid& g, const py::array_t<double>& omega) {
    return energy(g, field_from_array(g, omega));
  });
  m.def("disk_green_reference", &disk_green_reference, py::arg("x"), py::arg("y"),
        py::arg("radius"), py::arg("center") = Vec2{0, 0});

  py::class_<PatchSpec>(m, "PatchSpec")
      .def(py::init([](double lam, double mass) {
             return PatchSpec{lam, mass};
           }),
           py::arg("lam"), py::arg("mass") = 1.0)
      .def_readwrite("lam", &PatchSpec::lambda)
      .def_readwrite("mass", &PatchSpec::mass);

  m.def("admissible", [](const Grid& g, const PatchSpec& s, const py::array_t<double>& omega) {
    return admissible(field_from_array(g, omega), s, g);
  });
  m.def("uniform_field",
        [](const Grid& g, const PatchSpec& s) { return array_from_field(g, uniform_field(g, s)); });
  m.def("seed_patch", [](const Grid& g, const PatchSpec& s, Vec2 center) {
    return array_from_field(g, seed_patch(g, s, center));
  });
  m.def("ascent_step", [](const Grid& g, const PatchSpec& s, const py::array_t<double>& omega) {
    return array_from_field(g, ascent_step(field_from_array(g, omega), s, g));
  });
  m.def("threshold_level",
        [](const Grid& g, const PatchSpec& s, const py::array_t<double>& psi) {
          auto thr = threshold_level(field_from_array(g, psi), s, g);
          return py::make_tuple(thr.mu, thr.plateau_fraction);
        });

  py::class_<MaximizerResult>(m, "MaximizerResult")
      .def_property_readonly("omega",
                             [](const MaximizerResult& r) {
                               return py::array_t<double>(
                                   static_cast<py::ssize_t>(r.omega.size()), r.omega.data());
                             })
      .def_readonly("mu", &MaximizerResult::mu)
      .def_readonly("energy", &MaximizerResult::energy)
      .def_readonly("iterations", &MaximizerResult::iterations)
      .def_readonly("characterization_residual", &MaximizerResult::characterization_residual)
      .def_readonly("steadiness_residual", &MaximizerResult::steadiness_residual)
      .def_readonly("energy_history", &MaximizerResult::energy_history)
      .def_readonly("converged", &MaximizerResult::converged);

  m.def(
      "solve_maximizer",
      [](const Grid& g, const PatchSpec& s, const py::array_t<double>& init, double tol,
         int max_iter) { return solve_maximizer(g, s, field_from_array(g, init), tol, max_iter); },
      py::arg("grid"), py::arg("spec"), py::arg("init"), py::arg("tol") = 1e-8,
      py::arg("max_iter") = 500);
  m.def("maximizer_omega", [](const Grid& g, const MaximizerResult& r) {
    return array_from_field(g, r.omega);
  });

  m.def(
      "evolve",
      [](const Grid& g, const PatchSpec& s, const py::array_t<double>& omega0, double T,
         double cfl, const std::string& limiter) {
        EvolutionParams params;
        params.cfl = cfl;
        params.limiter = limiter_from_name(limiter);
        EvolveResult res = evolve(g, field_from_array(g, omega0), T, s, params);
        py::list samples;
        for (const auto& d : res.samples) {
          py::dict row;
          row["t"] = d.t;
          row["energy"] = d.energy;
          row["mass"] = d.mass;
          row["l1"] = d.l1;
          row["l2"] = d.l2;
          row["min_w"] = d.min_w;
          row["max_w"] = d.max_w;
          samples.append(row);
        }
        return py::make_tuple(samples, array_from_field(g, res.final_state.omega));
      },
      py::arg("grid"), py::arg("spec"), py::arg("omega0"), py::arg("T"), py::arg("cfl") = 0.4,
      py::arg("limiter") = "superbee");
  m.def("eddy_turnover_time", [](const Grid& g, const PatchSpec& s,
                                 const py::array_t<double>& omega) {
    return eddy_turnover_time(g, field_from_array(g, omega), s);
  });

  m.def("lp_distance", [](const Grid& g, const py::array_t<double>& a,
                          const py::array_t<double>& b, int p) {
    return lp_distance(field_from_array(g, a), field_from_array(g, b), p, g);
  });
  m.def(
      "perturb",
      [](const Grid& g, const PatchSpec& s, const py::array_t<double>& omega, double delta,
         const std::string& kind, std::uint64_t seed) {
        ExperimentConfig cfg;
        cfg.delta = delta;
        cfg.kind = perturbation_kind_from_name(kind);
        cfg.seed = seed;
        return array_from_field(g, perturb(field_from_array(g, omega), cfg, s, g));
      },
      py::arg("grid"), py::arg("spec"), py::arg("omega"), py::arg("delta"),
      py::arg("kind") = "translate", py::arg("seed") = 1);
}
