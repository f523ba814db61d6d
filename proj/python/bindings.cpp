#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bloch/cli.hpp"
#include "bloch/green.hpp"
#include "bloch/halfline.hpp"
#include "bloch/potential.hpp"
#include "bloch/transfer.hpp"

namespace py = pybind11;
using namespace bloch;

namespace {

py::array_t<Complex> as_array(const Mat2& m) {
    py::array_t<Complex> a({2, 2});
    auto r = a.mutable_unchecked<2>();
    r(0, 0) = m.a, r(0, 1) = m.b, r(1, 0) = m.c, r(1, 1) = m.d;
    return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact and low-energy Green functions of periodic 1D potentials";

    static py::exception<ConfigError> config_error(m, "ConfigError", PyExc_ValueError);
    static py::exception<NumericError> numeric_error(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ConfigError& e) {
            PyErr_SetString(config_error.ptr(), e.what());
        } catch (const NumericError& e) {
            PyErr_SetString(numeric_error.ptr(), e.what());
        }
    });

    py::class_<PeriodicPotential>(m, "Potential")
        .def_property_readonly("period", &PeriodicPotential::period)
        .def_property_readonly("offset", &PeriodicPotential::offset)
        .def_property_readonly("has_jumps", &PeriodicPotential::has_jumps)
        .def("V", py::vectorize(&PeriodicPotential::V), py::arg("x"))
        .def("f", py::vectorize(&PeriodicPotential::f), py::arg("x"))
        .def("describe", &PeriodicPotential::describe)
        .def("__repr__", [](const PeriodicPotential& p) { return "<Potential " + p.describe() + ">"; });

    m.def("parse_potential", [](const std::string& s) { return parse_potential(s); }, py::arg("text"));
    m.def("load_potential", [](const std::string& f) { return load_potential(f); }, py::arg("path"));
    m.def("square_potential", &square_potential, py::arg("C"), py::arg("L"), py::arg("a"));
    m.def("free_potential", &free_potential, py::arg("L"));
    m.def("cosine_potential", &cosine_potential, py::arg("amp"), py::arg("L"), py::arg("phase") = 0.0);

    m.def(
        "cell_constants",
        [](const PeriodicPotential& p) {
            auto c = cell_constants(p);
            py::dict d;
            d["M"] = c.M, d["P"] = c.P, d["L0"] = c.L0, d["V0"] = c.V0;
            return d;
        },
        py::arg("pot"));

    m.def(
        "evolve", [](const PeriodicPotential& p, double x, double xp, Complex k) { return as_array(evolve(p, x, xp, k).matrix()); },
        py::arg("pot"), py::arg("x"), py::arg("xprime"), py::arg("k"));

    m.def(
        "monodromy",
        [](const PeriodicPotential& p, Complex k) {
            auto mo = monodromy(p, k);
            py::dict d;
            d["Y"] = mo.Y, d["Z"] = mo.Z, d["lambda"] = mo.lambda, d["band"] = band_name(mo.band);
            return d;
        },
        py::arg("pot"), py::arg("k"));

    m.def("classify_band", [](const PeriodicPotential& p, double k) { return std::string(band_name(classify_band(p, k))); },
          py::arg("pot"), py::arg("k"));

    m.def(
        "s_functions",
        [](const PeriodicPotential& p, double x, Complex k) {
            auto s = s_functions(p, x, k);
            return py::make_tuple(s.Sr, s.Sl, s.S);
        },
        py::arg("pot"), py::arg("x"), py::arg("k"));

    m.def(
        "green_exact",
        [](const PeriodicPotential& p, double x, double y, Complex k) {
            auto g = green_exact(p, x, y, k);
            return py::make_tuple(g.G_S, g.G_F);
        },
        py::arg("pot"), py::arg("x"), py::arg("y"), py::arg("k"), "Schrodinger and Fokker-Planck values at (x, y; k)");

    py::class_<GreenSeries>(m, "GreenSeries")
        .def_readonly("gm1", &GreenSeries::gm1)
        .def_readonly("g0", &GreenSeries::g0)
        .def_readonly("g1", &GreenSeries::g1)
        .def_readonly("g2", &GreenSeries::g2)
        .def("eval", &GreenSeries::eval, py::arg("k"), py::arg("order") = 2);
    m.def("green_series", &green_series, py::arg("pot"), py::arg("x"), py::arg("y"), py::arg("tol") = 1e-11);

    m.def(
        "render",
        [](const std::string& potential, const std::string& cmd, double kmin, double kmax, int n, double x, double y,
           int order) {
            cli::RunConfig c;
            c.potential_path = potential, c.command = cmd;
            c.k_min = kmin, c.k_max = kmax, c.k_count = n, c.x = x, c.y = y, c.order = order;
            return cli::render(c);
        },
        py::arg("potential"), py::arg("cmd") = "bands", py::arg("kmin") = 0.0, py::arg("kmax") = 12.0, py::arg("n") = 600,
        py::arg("x") = 0.4, py::arg("y") = 0.1, py::arg("order") = 2, "CSV text as written by the command line tool");

    m.attr("version") = cli::kVersion;
}
