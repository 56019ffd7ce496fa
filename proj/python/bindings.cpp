#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "goerw/analysis.hpp"
#include "goerw/cutset.hpp"
#include "goerw/environment.hpp"
#include "goerw/error.hpp"
#include "goerw/percolation.hpp"
#include "goerw/tree.hpp"
#include "goerw/walk.hpp"

namespace py = pybind11;
using namespace goerw;

namespace {

py::dict estimate_dict(const BinomialEstimate& e) {
    py::dict d;
    d["successes"] = e.successes;
    d["trials"] = e.trials;
    d["excluded"] = e.excluded;
    d["estimate"] = e.estimate();
    d["std_error"] = e.std_error();
    return d;
}

std::vector<VertexId> span_vec(std::span<const VertexId> s) { return {s.begin(), s.end()}; }

}  // namespace

PYBIND11_MODULE(_goerw, m) {
    m.doc() = "Once-excited random walks on trees";

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error;
    error.call_once_and_store_result([&] { return py::exception<Error>(m, "Error", PyExc_RuntimeError); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p)
                std::rethrow_exception(p);
        } catch (const Error& e) {
            if (e.is_usage_error())
                PyErr_SetString(PyExc_ValueError, e.what());
            else
                PyErr_SetString(error.get_stored().ptr(), (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
        }
    });

    py::class_<Tree>(m, "Tree")
        .def_static("from_parents", py::overload_cast<std::vector<VertexId>>(&Tree::from_parents))
        .def("__len__", &Tree::size)
        .def_property_readonly("truncation_depth", &Tree::truncation_depth)
        .def("parent", [](const Tree& t, VertexId v) -> py::object {
            if (v >= t.size())
                throw py::index_error("vertex out of range");
            return v == Tree::root() ? py::none() : py::cast(t.parent(v));
        })
        .def("children", [](const Tree& t, VertexId v) { return span_vec(t.children(v)); })
        .def("depth", &Tree::depth)
        .def("degree", &Tree::degree)
        .def("level", [](const Tree& t, std::uint32_t n) {
            if (n > t.truncation_depth())
                throw py::index_error("depth beyond the truncation depth");
            return span_vec(t.level(n));
        })
        .def("level_sizes", &Tree::level_sizes)
        .def("path_from_root", &Tree::path_from_root)
        .def("common_ancestor", &Tree::common_ancestor)
        .def("__repr__", [](const Tree& t) {
            return "<Tree n=" + std::to_string(t.size()) + " L=" + std::to_string(t.truncation_depth()) + ">";
        });

    m.def("build_path", &build_path, py::arg("L"));
    m.def("build_regular", &build_regular, py::arg("d"), py::arg("L"));
    m.def("build_polynomial", &build_polynomial, py::arg("b"), py::arg("L"));
    m.def("polynomial_level_sizes", &polynomial_level_sizes, py::arg("b"), py::arg("L"));
    m.def("build_galton_watson",
          [](std::vector<double> pmf, std::uint32_t L, std::uint64_t seed) { return build_galton_watson(pmf, L, seed); },
          py::arg("pmf"), py::arg("L"), py::arg("seed"));

    py::class_<AlphaDistribution>(m, "AlphaDistribution")
        .def_static("point", &AlphaDistribution::point)
        .def_static("two_point", &AlphaDistribution::two_point)
        .def_static("parse", &AlphaDistribution::parse)
        .def_property_readonly("m", &AlphaDistribution::m)
        .def("spec", &AlphaDistribution::spec);

    py::class_<Environment>(m, "Environment")
        .def("__len__", &Environment::size)
        .def("lambda_", &Environment::lambda)
        .def("mu", &Environment::mu)
        .def("is_oerw", &Environment::is_oerw);

    m.def("unit_environment", [](const Tree& t) {
        return assign_deterministic(t, [](VertexId) { return 1.0; }, [](VertexId) { return 1.0; });
    });
    m.def("sample_random_environment", &sample_random_environment, py::arg("tree"), py::arg("dist"),
          py::arg("seed"));
    m.def("environment_from_columns", &environment_from_columns, py::arg("lambda_"), py::arg("mu"));

    m.def("resistance", py::overload_cast<const Tree&, const Environment&, VertexId>(&resistance));
    m.def("phi", py::overload_cast<const Tree&, const Environment&, VertexId>(&phi));
    m.def("psi", py::overload_cast<const Tree&, const Environment&, VertexId>(&psi));
    m.def("Psi", py::overload_cast<const Tree&, const Environment&, VertexId>(&Psi));
    m.def("adapted_conductance", &adapted_conductance);
    m.def("kappa", &kappa);

    m.def("min_cutset_sum", [](const Tree& t, std::vector<double> w) {
        const auto r = min_cutset_sum(t, EdgeWeighting(std::move(w)));
        return py::make_tuple(r.value, r.cutset);
    }, "Minimum over cutsets of the summed edge weights; weights are indexed by child id.");

    m.def("simulate", [](const Tree& t, const Environment& env, std::uint64_t seed, std::optional<std::uint64_t> max_steps,
                         std::optional<std::uint32_t> hit_depth, std::optional<std::uint32_t> returns) {
        StopRule stop;
        stop.max_steps = max_steps;
        stop.hit_depth = hit_depth;
        stop.returns_to_root = returns;
        const auto w = simulate(t, env, stop, seed);
        py::dict d;
        d["positions"] = w.positions;
        d["steps"] = w.steps;
        d["returns_to_root"] = w.returns_to_root;
        d["max_depth"] = w.max_depth;
        d["escaped"] = w.escaped;
        d["reason"] = to_string(w.reason);
        return d;
    }, py::arg("tree"), py::arg("env"), py::arg("seed"), py::arg("max_steps") = py::none(),
       py::arg("hit_depth") = py::none(), py::arg("returns") = py::none());

    m.def("edge_connection_probability", [](const Tree& t, const Environment& env, VertexId e, std::uint64_t trials,
                                            std::uint64_t seed) {
        py::gil_scoped_release release;
        return edge_connection_probability_mc(t, env, e, trials, seed);
    }, py::arg("tree"), py::arg("env"), py::arg("edge"), py::arg("trials"), py::arg("seed"));

    py::class_<BinomialEstimate>(m, "BinomialEstimate")
        .def_readonly("successes", &BinomialEstimate::successes)
        .def_readonly("trials", &BinomialEstimate::trials)
        .def_readonly("excluded", &BinomialEstimate::excluded)
        .def_property_readonly("estimate", &BinomialEstimate::estimate)
        .def_property_readonly("std_error", &BinomialEstimate::std_error)
        .def("within", &BinomialEstimate::within)
        .def("as_dict", &estimate_dict);

    m.def("gambler_ruin_profile", [](std::vector<double> mu) { return gambler_ruin_profile(GamblerChain(mu, 0)); },
          "x_0..x_N for interior biases mu_1..mu_{N-1}.");
    m.def("gambler_ruin_exact", [](std::vector<double> mu, std::uint32_t start) {
        return gambler_ruin_exact(GamblerChain(std::move(mu), start));
    }, py::arg("mu"), py::arg("start"));

    m.def("phase_scan", [](double b, std::uint32_t L, const AlphaDistribution& dist, std::uint32_t escape_depth,
                           std::uint64_t horizon, std::uint64_t trials, std::uint64_t seed, double margin,
                           double control_b) {
        const auto v = phase_diagnostic(polynomial_phase_family(b, L), polynomial_phase_family(control_b, L), dist,
                                        margin, escape_depth, horizon, trials, seed);
        py::dict d;
        d["verdict"] = to_string(v.verdict);
        d["escape"] = estimate_dict(v.escape);
        d["control_escape"] = estimate_dict(v.control_escape);
        d["sigma"] = v.sigma;
        d["br_r"] = v.br_r;
        d["threshold"] = v.threshold;
        return d;
    }, py::arg("b"), py::arg("L"), py::arg("dist"), py::arg("escape_depth"), py::arg("horizon") = 1'000'000,
       py::arg("trials") = 2000, py::arg("seed") = 1, py::arg("margin") = 0.1, py::arg("control_b") = 0.25);
}
