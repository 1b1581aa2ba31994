// SPDX-License-Identifier: Apache-2.0
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "speclab/eigensolve.hpp"
#include "speclab/experiments.hpp"
#include "speclab/oscillator1d.hpp"
#include "speclab/potential.hpp"

namespace py = pybind11;
using namespace speclab;

namespace {

SolveOptions options(double tol, std::uint64_t seed) {
  SolveOptions o;
  o.tol = tol;
  o.seed = seed;
  return o;
}

using release = py::call_guard<py::gil_scoped_release>;

}  // namespace

PYBIND11_MODULE(_speclab, m) {
  m.doc() = "Spectra of -Laplacian + |xy|^p - lambda (x^2+y^2)^{p/(p+2)} and its one-dimensional oscillator";
  m.attr("__version__") = SPECLAB_VERSION;

  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<BracketError>(m, "BracketError", PyExc_RuntimeError);

  py::enum_<BoundaryKind>(m, "BoundaryKind")
      .value("DIRICHLET", BoundaryKind::Dirichlet)
      .value("NEUMANN", BoundaryKind::Neumann);

  m.def(
      "potential",
      [](double x, double y, double p, double lambda) { return potential_2d(x, y, PotentialParams(p, lambda)); },
      py::arg("x"), py::arg("y"), py::arg("p"), py::arg("lam"));

  py::class_<GammaReport>(m, "GammaReport")
      .def_readonly("gamma", &GammaReport::gamma)
      .def_readonly("halflength", &GammaReport::halflength)
      .def_readonly("meshcount", &GammaReport::meshcount)
      .def_readonly("change", &GammaReport::change)
      .def_readonly("refinements", &GammaReport::refinements);
  m.def("gamma", [](double p, double tol) { return speclab::gamma(p, tol); }, py::arg("p"), py::arg("tol") = 1e-8,
        release());
  m.def("gamma_report", &gamma_report, py::arg("p"), py::arg("tol") = 1e-8, release());
  m.def("truncated_gamma", &truncated_gamma, py::arg("p"), py::arg("k"), py::arg("tol") = 1e-8, release());

  py::class_<GammaMinimum>(m, "GammaMinimum")
      .def_readonly("pstar", &GammaMinimum::pstar)
      .def_readonly("gammastar", &GammaMinimum::gammastar)
      .def_readonly("evaluations", &GammaMinimum::evaluations);
  m.def("gamma_min", &gamma_min, py::arg("plo") = 1.0, py::arg("phi") = 3.0, py::arg("tol") = 1e-8, release());

  py::class_<LatticeSpectrum>(m, "LatticeSpectrum")
      .def_readonly("eigenvalues", &LatticeSpectrum::eigenvalues)
      .def_readonly("residuals", &LatticeSpectrum::residuals)
      .def_property_readonly("sectors",
                             [](const LatticeSpectrum& s) {
                               std::vector<std::string> names;
                               for (Sector sec : s.sectors) names.push_back(to_string(sec));
                               return names;
                             })
      .def_readonly("iterations", &LatticeSpectrum::iterations)
      .def_readonly("converged", &LatticeSpectrum::converged);
  m.def(
      "spectrum",
      [](double p, double lambda, double radius, double spacing, BoundaryKind bc, int count, double tol,
         std::uint64_t seed) {
        return solve_lowest(grid_for_spacing(radius, spacing), PotentialParams(p, lambda), bc, count,
                            options(tol, seed));
      },
      py::arg("p"), py::arg("lam"), py::arg("radius") = 20.0, py::arg("spacing") = 0.05,
      py::arg("bc") = BoundaryKind::Dirichlet, py::arg("count") = 4, py::arg("tol") = 1e-8, py::arg("seed") = 42,
      release());

  py::class_<CutoffRow>(m, "CutoffRow")
      .def_readonly("radius", &CutoffRow::radius)
      .def_readonly("npts", &CutoffRow::npts)
      .def_readonly("eigenvalues", &CutoffRow::eigenvalues)
      .def_readonly("residuals", &CutoffRow::residuals)
      .def_readonly("converged", &CutoffRow::converged);
  m.def(
      "cutoff_scan",
      [](double p, double lambda, const std::vector<double>& radii, BoundaryKind bc, int count, double spacing,
         double tol, std::uint64_t seed) {
        return cutoff_scan(PotentialParams(p, lambda), radii, bc, count, spacing, options(tol, seed));
      },
      py::arg("p"), py::arg("lam"), py::arg("radii"), py::arg("bc") = BoundaryKind::Dirichlet, py::arg("count") = 2,
      py::arg("spacing") = 0.05, py::arg("tol") = 1e-8, py::arg("seed") = 42, release());

  py::class_<BracketRow>(m, "BracketRow")
      .def_readonly("index", &BracketRow::index)
      .def_readonly("neumann", &BracketRow::neumann)
      .def_readonly("dirichlet", &BracketRow::dirichlet)
      .def_readonly("gap", &BracketRow::gap);
  py::class_<DnBracket>(m, "DnBracket")
      .def_readonly("radius", &DnBracket::radius)
      .def_readonly("spacing", &DnBracket::spacing)
      .def_readonly("rows", &DnBracket::rows)
      .def_readonly("converged", &DnBracket::converged);
  m.def(
      "dn_bracket",
      [](double p, double lambda, double radius, double spacing, int count, double tol, std::uint64_t seed) {
        return dn_bracket(PotentialParams(p, lambda), radius, spacing, count, options(tol, seed));
      },
      py::arg("p"), py::arg("lam"), py::arg("radius") = 20.0, py::arg("spacing") = 0.05, py::arg("count") = 2,
      py::arg("tol") = 1e-8, py::arg("seed") = 42, release());

  py::class_<CriticalResult>(m, "CriticalResult")
      .def_readonly("p", &CriticalResult::p)
      .def_readonly("lambdastar", &CriticalResult::lambdastar)
      .def_readonly("lower", &CriticalResult::lower)
      .def_readonly("upper", &CriticalResult::upper)
      .def_readonly("e_lower", &CriticalResult::e_lower)
      .def_readonly("e_upper", &CriticalResult::e_upper)
      .def_readonly("gamma", &CriticalResult::gamma)
      .def_readonly("solves", &CriticalResult::solves)
      .def_readonly("certified", &CriticalResult::certified);
  m.def(
      "critical_lambda",
      [](double p, double radius, double spacing, double width, double tol, std::uint64_t seed) {
        return critical_lambda(p, radius, spacing, width, options(tol, seed));
      },
      py::arg("p"), py::arg("radius") = 20.0, py::arg("spacing") = 0.05, py::arg("width") = 1e-4,
      py::arg("tol") = 1e-8, py::arg("seed") = 42, release());

  py::class_<CriticalScan>(m, "CriticalScan")
      .def_readonly("pvalues", &CriticalScan::pvalues)
      .def_readonly("lambdastar", &CriticalScan::lambdastar)
      .def_readonly("gammacurve", &CriticalScan::gammacurve)
      .def_readonly("uncertainty", &CriticalScan::uncertainty)
      .def_readonly("resolved", &CriticalScan::resolved)
      .def_readonly("errors", &CriticalScan::errors)
      .def_readonly("radius", &CriticalScan::radius)
      .def_readonly("resolution", &CriticalScan::resolution)
      .def_readonly("meeting", &CriticalScan::meeting)
      .def_readonly("resolution_limited", &CriticalScan::resolution_limited);
  m.def(
      "critical_surface",
      [](const std::vector<double>& pvalues, double radius, double spacing, double width, double tol,
         std::uint64_t seed) { return critical_surface(pvalues, radius, spacing, width, options(tol, seed)); },
      py::arg("pvalues"), py::arg("radius") = 20.0, py::arg("spacing") = 0.05, py::arg("width") = 1e-4,
      py::arg("tol") = 1e-8, py::arg("seed") = 42, release());

  py::class_<QuasimodeResult>(m, "QuasimodeResult")
      .def_readonly("norm", &QuasimodeResult::norm)
      .def_readonly("residual", &QuasimodeResult::residual)
      .def_readonly("relative", &QuasimodeResult::relative)
      .def_readonly("tcut", &QuasimodeResult::tcut)
      .def_readonly("change", &QuasimodeResult::change);
  m.def(
      "quasimode",
      [](double p, double lambda, double mu, const std::vector<double>& ks, bool critical) {
        const OscillatorSolution osc = quasimode_oscillator(p);
        std::vector<QuasimodeResult> out;
        for (double k : ks) {
          const QuasimodeSpec spec = critical ? make_critical(mu, k, osc)
                                              : make_supercritical(PotentialParams(p, lambda), mu, k, osc);
          out.push_back(quasimode_residual(spec));
        }
        return out;
      },
      py::arg("p"), py::arg("lam"), py::arg("mu"), py::arg("ks"), py::arg("critical") = false, release());

  m.def("clambda", &clambda, py::arg("p"), py::arg("gamma"), py::arg("lam"));
  m.def("moment_boundshape", &moment_boundshape, py::arg("p"), py::arg("gamma"), py::arg("lam"),
        py::arg("biglambda"), py::arg("sigma"));
  py::class_<MomentReport>(m, "MomentReport")
      .def_readonly("biglambda", &MomentReport::biglambda)
      .def_readonly("sigma", &MomentReport::sigma)
      .def_readonly("gamma", &MomentReport::gamma)
      .def_readonly("eigenvalues", &MomentReport::eigenvalues)
      .def_readonly("moment", &MomentReport::moment)
      .def_readonly("clambda", &MomentReport::clambda)
      .def_readonly("boundshape", &MomentReport::boundshape)
      .def_readonly("ratio", &MomentReport::ratio)
      .def_readonly("converged", &MomentReport::converged);
  m.def(
      "moment_sum",
      [](double p, double lambda, double biglambda, double sigma, double radius, double spacing, double tol,
         std::uint64_t seed) {
        return moment_sum(PotentialParams(p, lambda), biglambda, sigma, radius, spacing, options(tol, seed));
      },
      py::arg("p"), py::arg("lam"), py::arg("biglambda"), py::arg("sigma") = 1.5, py::arg("radius") = 20.0,
      py::arg("spacing") = 0.05, py::arg("tol") = 1e-8, py::arg("seed") = 42, release());

  m.def(
      "eigenfunction",
      [](double p, double lambda, double radius, double spacing, BoundaryKind bc, int index, double tol,
         std::uint64_t seed) {
        EigenfunctionGrid g;
        {
          py::gil_scoped_release unlock;
          g = export_eigenfunction(PotentialParams(p, lambda), radius, spacing, bc, index, options(tol, seed));
        }
        py::array_t<double> values({g.npts, g.npts});
        std::copy(g.values.begin(), g.values.end(), values.mutable_data());
        py::array_t<double> coords(g.npts);
        for (int i = 0; i < g.npts; ++i) coords.mutable_at(i) = g.coordinate(i);
        return py::make_tuple(coords, values, g.eigenvalue);
      },
      py::arg("p"), py::arg("lam"), py::arg("radius") = 20.0, py::arg("spacing") = 0.05,
      py::arg("bc") = BoundaryKind::Dirichlet, py::arg("index") = 1, py::arg("tol") = 1e-8, py::arg("seed") = 42);
}
