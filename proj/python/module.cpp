#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "hampath/cli.hpp"
#include "hampath/errors.hpp"
#include "hampath/operators.hpp"
#include "hampath/propagators.hpp"
#include "hampath/verify.hpp"

namespace py = pybind11;
using namespace hampath;

namespace {

py::dict to_dict(const verify::Report& report) {
    py::dict results;
    for (const auto& [name, value] : report.lines) results[py::str(name)] = value;
    py::dict out;
    out["suite"] = report.suite;
    out["pass"] = report.pass;
    out["results"] = results;
    return out;
}

py::tuple run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> full{"hampath"};
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : full) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Phase-space path integral propagators";

    auto error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
    auto domain = py::register_exception<DomainError>(m, "DomainError", error.ptr());
    py::register_exception<SingularTime>(m, "SingularTime", domain.ptr());

    m.def("ho_propagator",
          [](double k, double t, double p) { return ho_propagator(HOParams{k, t, p}); },
          py::arg("k"), py::arg("t"), py::arg("p"));
    m.def("ho_t_transform_value",
          [](double k, double t, double p, int grid_n) {
              const TimeGrid g = build_grid(t, grid_n);
              return HarmonicOscillator(k, t, g).expectation(p);
          },
          py::arg("k"), py::arg("t"), py::arg("p"), py::arg("grid_n") = 200);
    m.def("free_expectation",
          [](double p0, double p, double t, double eps, int grid_n) {
              return free_expectation_eps(FreeParams{p0, p, t, eps}, grid_n);
          },
          py::arg("p0"), py::arg("p"), py::arg("t"), py::arg("eps"), py::arg("grid_n") = 256);
    m.def("free_expectation_reference",
          [](double p0, double p, double t, double eps) {
              return free_expectation_reference(FreeParams{p0, p, t, eps});
          },
          py::arg("p0"), py::arg("p"), py::arg("t"), py::arg("eps"));
    m.def("fredholm_det",
          [](double k, double t, int terms) {
              const FredholmDeterminant d = fredholm_det(k, t, terms);
              py::dict out;
              out["product"] = d.product;
              out["closed_form"] = d.closed_form;
              out["discrepancy"] = d.discrepancy;
              return out;
          },
          py::arg("k"), py::arg("t"), py::arg("terms") = 100000);
    m.def("dense_fredholm_det",
          [](double k, double t, int grid_n) { return dense_fredholm_det(build_grid(t, grid_n), k); },
          py::arg("k"), py::arg("t"), py::arg("grid_n") = 200);
    m.def("pin_spectral_sum", &ho_pin_spectral_sum, py::arg("k"), py::arg("t"),
          py::arg("terms") = 100000);
    m.def("eigenvalues",
          [](double t, int grid_n, int count) { return spectrum_A(build_grid(t, grid_n), count).eigenvalues; },
          py::arg("t"), py::arg("grid_n"), py::arg("count") = 5);
    m.def("exact_eigenvalue", &exact_eigenvalue_A, py::arg("t"), py::arg("m"));
    m.def("is_singular_time", &is_singular_time, py::arg("k"), py::arg("t"));
    m.def("schrodinger_residual",
          [](double k, double t, double p, double h) {
              return schrodinger_residual(HOParams{k, t, p}, h, h);
          },
          py::arg("k"), py::arg("t"), py::arg("p"), py::arg("h") = 1e-3);

    m.def("verify_determinant",
          [](double k, double t, int terms, int grid_n) { return to_dict(verify::determinant(k, t, terms, grid_n)); },
          py::arg("k") = 1.0, py::arg("t") = 1.0, py::arg("terms") = 100000, py::arg("grid_n") = 500);
    m.def("verify_spectrum",
          [](double t, int grid_n) { return to_dict(verify::spectrum(t, grid_n)); },
          py::arg("t") = 1.0, py::arg("grid_n") = 2000);
    m.def("verify_pde", [](double k, double h) { return to_dict(verify::pde(k, h)); },
          py::arg("k") = 1.0, py::arg("h") = 1e-3);
    m.def("verify_oracle",
          [](double k, double t, double p, int dim, double eps, double p0, int grid_n) {
              return to_dict(verify::oracle_agreement(k, t, p, dim, eps, p0, grid_n));
          },
          py::arg("k") = 1.0, py::arg("t") = 1.0, py::arg("p") = 0.0, py::arg("dim") = 200,
          py::arg("eps") = 0.01, py::arg("p0") = 0.0, py::arg("grid_n") = 256);
    m.def("verify_free_limit",
          [](double p0, double t, int grid_n) { return to_dict(verify::free_limit(p0, t, grid_n)); },
          py::arg("p0") = 0.0, py::arg("t") = 1.0, py::arg("grid_n") = 32);

    m.def("run_cli", &run_cli, py::arg("args"),
          "Run the command-line tool in process; returns (exit_code, stdout, stderr).");
}
