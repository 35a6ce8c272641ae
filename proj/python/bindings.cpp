#include "dualcause/benchmark.hpp"
#include "dualcause/confidence.hpp"
#include "dualcause/dualml.hpp"
#include "dualcause/errors.hpp"
#include "dualcause/io.hpp"
#include "dualcause/scm.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
namespace dc = dualcause;

namespace {

dc::RegimeTag regime_arg(const std::string& name, std::size_t i, std::size_t j) {
    return dc::RegimeTag::parse(name, i, j);
}

py::dict region_dict(const dc::ConfidenceRegion& r) {
    py::list intervals;
    for (const auto& iv : r.intervals()) intervals.append(py::make_tuple(iv.lower, iv.upper));
    py::dict out;
    out["intervals"] = intervals;
    out["zero_atom"] = r.zero_atom();
    out["includes_zero"] = r.includes_zero();
    out["width"] = r.width();
    out["alpha"] = r.alpha();
    out["n"] = r.n();
    out["regime"] = r.regime().name();
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Dual-likelihood total-effect estimates and confidence regions";

    auto base = py::register_exception<dc::Error>(m, "Error");
    py::register_exception<dc::SingularBlock>(m, "SingularBlock", base.ptr());
    py::register_exception<dc::SingularCovariance>(m, "SingularCovariance", base.ptr());
    py::register_exception<dc::DimensionTooLarge>(m, "DimensionTooLarge", base.ptr());
    py::register_exception<dc::DegenerateQuadratic>(m, "DegenerateQuadratic", base.ptr());
    py::register_exception<dc::GenerationExhausted>(m, "GenerationExhausted", base.ptr());
    py::register_exception<dc::InvalidSampleCount>(m, "InvalidSampleCount", base.ptr());
    py::register_exception<dc::InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<dc::ParseError>(m, "ParseError", base.ptr());

    py::class_<dc::LinearScm>(m, "LinearScm")
        .def(py::init([](const dc::Matrix& weights, const dc::Vector& variances, std::vector<std::size_t> order) {
                 return dc::LinearScm(weights, variances, dc::CompleteOrdering(std::move(order)));
             }),
             py::arg("weights"), py::arg("variances"), py::arg("order"))
        .def_property_readonly("weights", &dc::LinearScm::weights)
        .def_property_readonly("variances", &dc::LinearScm::variances)
        .def_property_readonly("order", [](const dc::LinearScm& s) { return s.order().perm(); })
        .def_property_readonly("regime", [](const dc::LinearScm& s) { return s.regime().name(); })
        .def("to_json", [](const dc::LinearScm& s) { return dc::to_json(s).dump(); });

    m.def("covariance_of", [](const dc::LinearScm& s) { return dc::covariance_of(s).matrix(); });
    m.def("true_effect", &dc::true_effect, py::arg("scm"), py::arg("i"), py::arg("j"));
    m.def(
        "sample", [](const dc::LinearScm& s, std::size_t n, std::uint64_t seed) { return dc::sample(s, n, seed).rows(); },
        py::arg("scm"), py::arg("n"), py::arg("seed"));
    m.def(
        "generate_benchmark_scm",
        [](std::size_t d, const std::string& regime, bool nonzero, std::size_t i, std::size_t j, std::uint64_t seed) {
            return dc::generate_benchmark_scm(d, regime_arg(regime, i, j),
                                              nonzero ? dc::EffectTruth::NonZero : dc::EffectTruth::Zero, i, j, seed);
        },
        py::arg("d"), py::arg("regime") = "general", py::arg("nonzero") = true, py::arg("i") = 0, py::arg("j") = 1,
        py::arg("seed") = 0);

    m.def(
        "empirical_covariance",
        [](const dc::Matrix& rows) { return dc::empirical_covariance(dc::SampleMatrix(rows)).matrix(); },
        py::arg("data"));
    m.def(
        "precision", [](const dc::Matrix& cov) { return dc::invert_pd(dc::PDMatrix(cov)).matrix(); }, py::arg("cov"));

    m.def(
        "estimate_effects",
        [](const dc::Matrix& precision, std::size_t n, std::size_t i, std::size_t j, const std::string& regime) {
            const auto e = dc::estimate_effects(dc::PDMatrix(precision), n, i, j, regime_arg(regime, i, j));
            py::dict out;
            out["values"] = e.values;
            out["optimum"] = e.optimum;
            out["regime"] = e.regime.name();
            return out;
        },
        py::arg("precision"), py::arg("n"), py::arg("i"), py::arg("j"), py::arg("regime") = "general");

    m.def(
        "confidence_region",
        [](const dc::Matrix& precision, std::size_t n, std::size_t i, std::size_t j, double alpha,
           const std::string& regime) {
            return region_dict(dc::confidence_region(dc::PDMatrix(precision), n, i, j, alpha, regime_arg(regime, i, j)));
        },
        py::arg("precision"), py::arg("n"), py::arg("i"), py::arg("j"), py::arg("alpha") = 0.05,
        py::arg("regime") = "general");

    m.def("chi2_quantile", &dc::chi2_quantile, py::arg("df"), py::arg("p"));
}
