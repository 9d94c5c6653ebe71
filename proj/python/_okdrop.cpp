#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "okdrop/diffuse.hpp"
#include "okdrop/droplet.hpp"
#include "okdrop/error.hpp"
#include "okdrop/experiments.hpp"
#include "okdrop/green.hpp"
#include "okdrop/limit_energy.hpp"
#include "okdrop/minimizer.hpp"
#include "okdrop/recovery.hpp"
#include "okdrop/sharp_energy.hpp"

namespace py = pybind11;
using namespace okdrop;

namespace {

Vec2 to_vec(std::pair<double, double> p) { return {p.first, p.second}; }
std::pair<double, double> from_vec(const Vec2& v) { return {v.x, v.y}; }

Polygon to_polygon(const std::vector<std::pair<double, double>>& pts) {
  Polygon poly;
  for (const auto& p : pts) poly.push_back(to_vec(p));
  return poly;
}

}  // namespace

PYBIND11_MODULE(_okdrop, m) {
  m.doc() = "Screened droplet energies on the flat torus";

  auto base = py::register_exception<Error>(m, "OkdropError", PyExc_RuntimeError);
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<GeometryError>(m, "GeometryError", base.ptr());
  py::register_exception<SingularityError>(m, "SingularityError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ConsistencyError>(m, "ConsistencyError", base.ptr());
  py::register_exception<ConstructionError>(m, "ConstructionError", base.ptr());
  py::register_exception<RelaxationError>(m, "RelaxationError", base.ptr());
  py::register_exception<ConstraintError>(m, "ConstraintError", base.ptr());
  py::register_exception<LiftingError>(m, "LiftingError", base.ptr());
  py::register_exception<StepSizeError>(m, "StepSizeError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());

  m.attr("OPTIMAL_AREA") = kOptimalArea;

  py::class_<TorusParams>(m, "TorusParams")
      .def(py::init([](double ell, double kappa, double delta_bar) {
             TorusParams p{ell, kappa, delta_bar};
             p.validate();
             return p;
           }),
           py::arg("ell") = 1.0, py::arg("kappa") = 1.0, py::arg("delta_bar") = 1.0)
      .def_readonly("ell", &TorusParams::ell)
      .def_readonly("kappa", &TorusParams::kappa)
      .def_readonly("delta_bar", &TorusParams::delta_bar)
      .def("__repr__", [](const TorusParams& p) {
        return "TorusParams(ell=" + std::to_string(p.ell) + ", kappa=" + std::to_string(p.kappa) +
               ", delta_bar=" + std::to_string(p.delta_bar) + ")";
      });

  py::class_<GreenEvaluator>(m, "Green")
      .def("value", [](const GreenEvaluator& g, double x, double y) { return g.value({x, y}); })
      .def("gradient", [](const GreenEvaluator& g, double x, double y) { return from_vec(g.at({x, y}).gradient); })
      .def("remainder", [](const GreenEvaluator& g, double x, double y) { return g.remainder({x, y}); })
      .def_property_readonly("remainder_at_origin", &GreenEvaluator::remainder_at_origin)
      .def_property_readonly("mode_count", &GreenEvaluator::mode_count)
      .def("selftest", &green_selftest, py::arg("grid") = 512);
  m.def("build_green", &build_green, py::arg("params"), py::arg("mode_count") = 256);

  py::class_<Droplet>(m, "Droplet")
      .def_static("disk", [](std::pair<double, double> c, double r) { return Droplet::disk(to_vec(c), r); })
      .def_static("polygon", [](std::pair<double, double> c, const std::vector<std::pair<double, double>>& v) {
        return Droplet::polygon(to_vec(c), to_polygon(v));
      })
      .def_property_readonly("center", [](const Droplet& d) { return from_vec(d.center); })
      .def_property_readonly("is_disk", &Droplet::is_disk)
      .def_readonly("radius", &Droplet::radius)
      .def("area", &Droplet::area)
      .def("perimeter", &Droplet::perimeter);

  py::class_<DropletConfig>(m, "DropletConfig")
      .def(py::init([](const TorusParams& p, double eps, std::vector<Droplet> ds) {
             DropletConfig c{p, eps, std::move(ds)};
             c.validate();
             return c;
           }),
           py::arg("params"), py::arg("epsilon"), py::arg("droplets"))
      .def_readonly("params", &DropletConfig::params)
      .def_readonly("epsilon", &DropletConfig::epsilon)
      .def_readonly("droplets", &DropletConfig::droplets)
      .def("__len__", [](const DropletConfig& c) { return c.droplets.size(); })
      .def("save", [](const DropletConfig& c, const std::string& path) { save_config(path, c); });
  m.def("load_config", &load_config);

  py::class_<EnergyBreakdown>(m, "EnergyBreakdown")
      .def_readonly("background", &EnergyBreakdown::background)
      .def_readonly("perimeter_term", &EnergyBreakdown::perimeter_term)
      .def_readonly("area_term", &EnergyBreakdown::area_term)
      .def_readonly("self_interaction", &EnergyBreakdown::self_interaction)
      .def_readonly("pair_interaction", &EnergyBreakdown::pair_interaction)
      .def_readonly("total_rescaled", &EnergyBreakdown::total_rescaled)
      .def_readonly("total_physical", &EnergyBreakdown::total_physical)
      .def("to_json", &EnergyBreakdown::to_json);
  m.def("sharp_energy", &sharp_energy, py::arg("config"), py::arg("green"), py::arg("quad_order") = 8);

  py::class_<OptimalDensity>(m, "OptimalDensity")
      .def_readonly("mu_bar", &OptimalDensity::mu_bar)
      .def_readonly("min_energy_density", &OptimalDensity::min_energy_density)
      .def_readonly("delta_c", &OptimalDensity::delta_c);
  m.def("optimal_constant_density", &optimal_constant_density);
  m.def("limit_energy_constant", &limit_energy_constant, py::arg("params"), py::arg("m"));
  m.def("limit_energy_grid", [](const TorusParams& p, int n, std::vector<double> samples) {
    return limit_energy(DensityMeasure::from_grid(p.ell, n, std::move(samples)), p);
  }, py::arg("params"), py::arg("n"), py::arg("samples"));
  m.def("golden_section_min", [](const std::function<double(double)>& f, double a, double b, double tol) {
    const auto r = golden_section_min([&](long double x) { return (long double)f((double)x); }, a, b, tol);
    return std::make_pair(r.argmin, r.value);
  }, py::arg("f"), py::arg("a"), py::arg("b"), py::arg("tol") = 1e-12);

  m.def("build_recovery", [](const TorusParams& p, double eps, double density, int n, std::uint64_t seed) {
    return build_recovery(DensityMeasure::constant(p.ell, n, density), eps, p, seed);
  }, py::arg("params"), py::arg("epsilon"), py::arg("density"), py::arg("grid") = 64, py::arg("seed") = 42);
  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("epsilon", &SweepRow::epsilon)
      .def_readonly("count", &SweepRow::count)
      .def_readonly("eta", &SweepRow::eta)
      .def_readonly("radius", &SweepRow::radius)
      .def_readonly("mass", &SweepRow::mass)
      .def_readonly("energy", &SweepRow::energy)
      .def_readonly("target", &SweepRow::target)
      .def_readonly("gap", &SweepRow::gap)
      .def_readonly("defect", &SweepRow::defect);
  m.def("recovery_sweep", [](const TorusParams& p, const std::vector<double>& eps, const GreenEvaluator& g,
                             std::uint64_t seed) {
    SweepOptions opt;
    opt.seed = seed;
    return recovery_sweep(p, eps, g, opt);
  }, py::arg("params"), py::arg("eps_list"), py::arg("green"), py::arg("seed") = 42);
  m.def("gap_strictly_decreasing", &gap_strictly_decreasing);

  py::class_<TraceRow>(m, "TraceRow")
      .def_readonly("step", &TraceRow::step)
      .def_readonly("energy", &TraceRow::energy)
      .def_readonly("max_gradient", &TraceRow::max_gradient)
      .def_readonly("min_distance", &TraceRow::min_distance);
  py::class_<RelaxResult>(m, "RelaxResult")
      .def_readonly("config", &RelaxResult::config)
      .def_readonly("trace", &RelaxResult::trace)
      .def_readonly("converged", &RelaxResult::converged);
  m.def("random_disk_ensemble", &random_disk_ensemble, py::arg("params"), py::arg("epsilon"), py::arg("n"),
        py::arg("lo"), py::arg("hi"), py::arg("seed"));
  m.def("relax_joint", &relax_joint, py::arg("config"), py::arg("green"), py::arg("rounds") = 20,
        py::arg("steps_per_pass") = 200, py::arg("step") = 0.05, py::call_guard<py::gil_scoped_release>());
  m.def("nearest_neighbor_cv", &nearest_neighbor_cv);

  py::class_<ComparisonReport>(m, "ComparisonReport")
      .def_readonly("epsilon", &ComparisonReport::epsilon)
      .def_readonly("grid", &ComparisonReport::grid)
      .def_readonly("sharp_energy", &ComparisonReport::sharp_energy)
      .def_readonly("diffuse_energy", &ComparisonReport::diffuse_energy)
      .def_readonly("ratio", &ComparisonReport::ratio)
      .def_readonly("diffuse_relaxed", &ComparisonReport::diffuse_relaxed)
      .def_readonly("ratio_relaxed", &ComparisonReport::ratio_relaxed);
  m.def("compare_energies", &compare_energies, py::arg("config"), py::arg("green"), py::arg("grid"),
        py::arg("relax_steps") = 20, py::arg("dt") = 0.5, py::call_guard<py::gil_scoped_release>());
}
