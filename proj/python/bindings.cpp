#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "ulam/config_io.hpp"
#include "ulam/experiments.hpp"

namespace py = pybind11;
using namespace ulam;

namespace {

AlgebraElement element_from_entries(int dim, const std::vector<complexd>& entries) {
    return AlgebraElement(dim, entries);
}

std::string run_experiment_json(const std::string& config_text) {
    ExperimentConfig cfg = parse_experiment_config(config_text);
    return report_to_json(run_experiment(cfg)).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "numerical laboratory for a unified additive/quadratic/cubic/quartic "
              "functional equation on small ternary algebras";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<StructuralError>(m, "StructuralError");

    py::class_<AlgebraElement>(m, "AlgebraElement")
        .def(py::init(&element_from_entries), py::arg("dim"), py::arg("entries"))
        .def_static("zero", &AlgebraElement::zero, py::arg("dim"))
        .def_static("identity", &AlgebraElement::identity, py::arg("dim"))
        .def_static("scalar", &AlgebraElement::scalar, py::arg("value"))
        .def_property_readonly("dim", &AlgebraElement::dim)
        .def_property_readonly("entries",
                               [](const AlgebraElement& e) { return e.entries(); })
        .def("norm", &AlgebraElement::norm)
        .def("__add__", &AlgebraElement::operator+)
        .def("__sub__",
             [](const AlgebraElement& a, const AlgebraElement& b) { return a - b; })
        .def("__mul__",
             [](const AlgebraElement& a, complexd c) { return a * c; })
        .def("__rmul__", [](const AlgebraElement& a, complexd c) { return a * c; })
        .def("__repr__", [](const AlgebraElement& e) {
            return "AlgebraElement(dim=" + std::to_string(e.dim()) + ")";
        });

    py::enum_<ProductRule>(m, "ProductRule")
        .value("derived", ProductRule::derived)
        .value("star", ProductRule::star)
        .value("trivial", ProductRule::trivial);

    py::enum_<ScaleDirection>(m, "ScaleDirection")
        .value("shrink", ScaleDirection::shrink)
        .value("expand", ScaleDirection::expand);

    py::class_<TernaryAlgebra>(m, "TernaryAlgebra")
        .def(py::init([](int dim, const std::string& rule) {
                 return TernaryAlgebra{dim, product_rule_from_string(rule), false};
             }),
             py::arg("dim") = 1, py::arg("product") = "derived")
        .def_readonly("dim", &TernaryAlgebra::dim)
        .def_property_readonly(
            "product_rule",
            [](const TernaryAlgebra& a) { return to_string(a.rule); })
        .def("product", &TernaryAlgebra::product)
        .def("power", &TernaryAlgebra::power, py::arg("x"), py::arg("m"))
        .def("norm", &TernaryAlgebra::norm);

    py::class_<AxiomCheck>(m, "AxiomCheck")
        .def_readonly("name", &AxiomCheck::name)
        .def_readonly("max_violation", &AxiomCheck::max_violation)
        .def_readonly("max_rel_violation", &AxiomCheck::max_rel_violation);

    py::class_<AxiomReport>(m, "AxiomReport")
        .def_readonly("checks", &AxiomReport::checks)
        .def_readonly("samples", &AxiomReport::samples)
        .def_readonly("seed", &AxiomReport::seed)
        .def("worst_relative", &AxiomReport::worst_relative);

    m.def(
        "check_algebra_axioms",
        [](const TernaryAlgebra& alg, int samples, std::uint64_t seed) {
            return check_algebra_axioms(alg, samples, seed);
        },
        py::arg("algebra"), py::arg("samples") = 100, py::arg("seed") = 42);
    m.def(
        "check_module_axioms",
        [](const TernaryAlgebra& alg, int samples, std::uint64_t seed) {
            return check_module_axioms(ModuleStructure{alg}, samples, seed);
        },
        py::arg("algebra"), py::arg("samples") = 100, py::arg("seed") = 42);

    py::class_<MapSpec>(m, "MapSpec")
        .def_static("zero", &MapSpec::zero_map, py::arg("dim") = 1)
        .def_static("monomial", &MapSpec::monomial, py::arg("coeff"), py::arg("degree"))
        .def_static(
            "inner_derivation",
            [](const AlgebraElement& coeff) {
                return MapSpec::inner_derivation(coeff, ProductRule::derived);
            },
            py::arg("coeff"))
        .def(
            "with_radial",
            [](const MapSpec& f, double epsilon, double exponent, const std::string& direction,
               std::uint64_t seed, std::optional<AlgebraElement> unit) {
                RadialPerturbation p;
                p.epsilon = epsilon;
                p.exponent = exponent;
                p.direction = radial_direction_from_string(direction);
                p.seed = seed;
                p.explicit_unit = std::move(unit);
                return f.with_radial(p);
            },
            py::arg("epsilon"), py::arg("exponent"), py::arg("direction") = "fixed",
            py::arg("seed") = 0, py::arg("unit") = std::nullopt)
        .def("__call__",
             [](const MapSpec& f, const AlgebraElement& x) { return evaluate(f, x); });

    m.def(
        "evaluate_scaled",
        [](const MapSpec& f, const AlgebraElement& x, int a, int m, int n,
           const std::string& direction) {
            return evaluate_scaled(f, x, a, m, n, direction_from_string(direction));
        },
        py::arg("f"), py::arg("x"), py::arg("a"), py::arg("m"), py::arg("n"),
        py::arg("direction") = "shrink");

    m.def("coeff_c", [](int mm) {
        Rational c = coeff_c(mm);
        return py::make_tuple(c.num, c.den);
    });

    py::class_<Permutation3>(m, "Permutation3")
        .def(py::init([](std::array<int, 3> images) { return Permutation3(images); }),
             py::arg("images"))
        .def("image", &Permutation3::image)
        .def_static("all", &Permutation3::all);

    py::class_<Residual>(m, "Residual")
        .def_readonly("element", &Residual::element)
        .def_readonly("scale", &Residual::scale)
        .def("norm", &Residual::norm)
        .def("relative", &Residual::relative);

    m.def(
        "delta_m",
        [](const MapSpec& f, const AlgebraElement& x, const AlgebraElement& y, int a, int mm) {
            return delta_m(f, x, y, a, mm);
        },
        py::arg("f"), py::arg("x"), py::arg("y"), py::arg("a"), py::arg("m"));
    m.def(
        "classical_residual",
        [](const std::string& eq, const MapSpec& f, const AlgebraElement& x,
           const AlgebraElement& y) {
            ClassicalEq e = eq == "quadratic" ? ClassicalEq::quadratic
                            : eq == "cubic"   ? ClassicalEq::cubic
                                              : ClassicalEq::quartic;
            return classical_residual(e, f.fn(), x, y);
        },
        py::arg("equation"), py::arg("f"), py::arg("x"), py::arg("y"));
    m.def(
        "derivation_residual",
        [](const MapSpec& f, const AlgebraElement& x, const AlgebraElement& y,
           const AlgebraElement& z, int mm, const TernaryAlgebra& alg) {
            return derivation_residual(f, x, y, z, mm, alg);
        },
        py::arg("f"), py::arg("x"), py::arg("y"), py::arg("z"), py::arg("m"),
        py::arg("algebra"));
    m.def(
        "sigma_hom_residual",
        [](const MapSpec& f, const AlgebraElement& x1, const AlgebraElement& x2,
           const AlgebraElement& x3, const Permutation3& sigma, const TernaryAlgebra& alg) {
            return sigma_hom_residual(f.fn(), x1, x2, x3, sigma, alg, alg);
        },
        py::arg("f"), py::arg("x1"), py::arg("x2"), py::arg("x3"), py::arg("sigma"),
        py::arg("algebra"));

    m.def("run_experiment", &run_experiment_json, py::arg("config_json"),
          "Run an experiment from a JSON config string; returns the report as JSON.");

    m.attr("__version__") = "0.1.0";
}
