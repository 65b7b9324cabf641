#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ftc/config.hpp"

namespace py = pybind11;
using namespace ftc;

namespace {

std::string mass_str(Pipeline& p, const std::vector<int>& address, bool global) {
    const auto& m = p.measure();
    return rational_str(global ? m->mass_global(address) : m->mass(address));
}

py::dict tau_dict(const TauPoint& t) {
    py::dict d;
    d["q"] = t.q;
    d["tau"] = t.tau;
    d["lower"] = t.lower;
    d["upper"] = t.upper;
    d["method"] = method_name(t.method);
    d["n"] = t.n;
    return d;
}

}  // namespace

PYBIND11_MODULE(ftcpy, mod) {
    mod.doc() = "Finite-type self-similar measures: exact atom masses and L^q spectra";

    py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
    py::register_exception<Inconclusive>(mod, "Inconclusive");
    py::register_exception<InvariantViolation>(mod, "InvariantViolation");

    mod.def("canonical", [](const std::string& text) { return IfsConfig::parse(text).canonical(); },
            "canonical JSON of a config text");
    mod.def("sha256_hex", &sha256_hex);

    py::class_<Pipeline>(mod, "Pipeline")
        .def(py::init([](const std::string& path, long max_states) {
                 PipelineOptions o;
                 o.max_states = max_states;
                 return Pipeline::from_file(path, o);
             }),
             py::arg("path"), py::arg("max_states") = -1)
        .def_property_readonly("name", [](const Pipeline& p) { return p.config().name; })
        .def_property_readonly("config_hash", &Pipeline::config_hash)
        .def("ftc_verified", &Pipeline::ftc_verified)
        .def("gamma_size", [](Pipeline& p) { return p.graph()->gamma_size(); })
        .def("num_states", [](Pipeline& p) { return p.automaton()->num_states(); })
        .def("num_edges", [](Pipeline& p) { return p.automaton()->edges().size(); })
        .def("addresses", [](Pipeline& p, int depth) { return p.automaton()->addresses(depth); })
        .def("mass", [](Pipeline& p, const std::vector<int>& a) { return mass_str(p, a, false); },
             "exact mass as a \"num/den\" string")
        .def("mass_global", [](Pipeline& p, const std::vector<int>& a) { return mass_str(p, a, true); })
        .def("automaton_json", [](Pipeline& p) { return p.automaton()->to_json(); })
        .def(
            "tau",
            [](Pipeline& p, double q, int pressure_n) {
                auto o = p.spectrum_options();
                if (pressure_n > 0) o.pressure_n = pressure_n;
                return tau_dict(p.spectrum(o).tau(q));
            },
            py::arg("q"), py::arg("pressure_n") = 0)
        .def(
            "lq_curve",
            [](Pipeline& p, const std::string& grid, int pressure_n) {
                auto o = p.spectrum_options();
                if (pressure_n > 0) o.pressure_n = pressure_n;
                py::list out;
                for (const auto& t : p.spectrum(o).lq_curve(parse_grid(grid)).points) out.append(tau_dict(t));
                return out;
            },
            py::arg("grid"), py::arg("pressure_n") = 0);
}
