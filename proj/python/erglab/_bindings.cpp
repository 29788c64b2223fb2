#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "erglab/dynamics.hpp"
#include "erglab/experiments.hpp"
#include "erglab/limits.hpp"
#include "erglab/processes.hpp"
#include "erglab/stats.hpp"

namespace py = pybind11;
using namespace erglab;

PYBIND11_MODULE(_erglab, m) {
  m.doc() = "erglab core routines";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<CensoringError>(m, "CensoringError", PyExc_RuntimeError);

  m.def("reg_inc_beta", &reg_inc_beta, py::arg("a"), py::arg("b"), py::arg("x"));
  m.def("pdf", [](const std::string& law, double x) { return pdf(parse_law(law), x); }, py::arg("law"), py::arg("x"));
  m.def("cdf", [](const std::string& law, double x) { return cdf(parse_law(law), x); }, py::arg("law"), py::arg("x"));
  m.def("quantile", [](const std::string& law, double p) { return quantile(parse_law(law), p); }, py::arg("law"),
        py::arg("p"));
  m.def(
      "sample",
      [](const std::string& law, std::size_t count, std::uint64_t seed) {
        const AlphaLaw l = parse_law(law);
        Rng rng(seed);
        std::vector<double> out(count);
        for (auto& v : out) v = sample(l, rng);
        return out;
      },
      py::arg("law"), py::arg("count"), py::arg("seed"));
  m.def(
      "ks_distance",
      [](std::vector<double> xs, const std::string& law) { return ks_distance(EmpiricalCDF(std::move(xs)), parse_law(law)); },
      py::arg("samples"), py::arg("law"));
  m.def("dkw_bound", &dkw_bound, py::arg("n"), py::arg("confidence") = 0.95);

  m.def("tail_prob", [](const std::string& tail, std::uint64_t n) { return tail_prob(parse_tail(tail), n); },
        py::arg("tail"), py::arg("n"));
  m.def("exact_zn_pmf", [](const std::string& tail, std::uint64_t n) { return exact_zn_pmf(parse_tail(tail), n); },
        py::arg("tail"), py::arg("n"));
  m.def(
      "laplace_product",
      [](const std::string& tail, double s) {
        const LaplaceProduct p = laplace_product(parse_tail(tail), s, laplace_truncation(s));
        return py::dict(py::arg("q") = p.q, py::arg("u") = p.u, py::arg("product") = p.product);
      },
      py::arg("tail"), py::arg("s"));

  m.def(
      "run",
      [](const std::string& command, const std::map<std::string, std::string>& settings) {
        std::ostringstream csv, log;
        const int rc = run(parse_config(command, settings), csv, log);
        return py::make_tuple(rc, csv.str(), log.str());
      },
      py::arg("command"), py::arg("settings"),
      "Run a tool command; returns (exit status, CSV text, log text). Values are strings as on the command line.");
}
