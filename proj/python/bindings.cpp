// Python module _cmacg. Matrices cross the boundary as complex128 numpy
// arrays; a batch of frames is an (n, m, r) array.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "cmacg/distributions.hpp"
#include "cmacg/special.hpp"
#include "cmacg/verify.hpp"

namespace py = pybind11;
using namespace cmacg;

namespace {

using Frames = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

Frames to_array(const std::vector<StiefelPoint>& draws, std::size_t m, std::size_t r) {
    Frames out({draws.size(), m, r});
    auto v = out.mutable_unchecked<3>();
    for (std::size_t k = 0; k < draws.size(); ++k)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < r; ++j)
                v(k, i, j) = draws[k].frame()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return out;
}

// Accepts one (m, r) frame or an (n, m, r) stack.
std::vector<ComplexMatrix> from_array(const Frames& a) {
    if (a.ndim() == 2) {
        ComplexMatrix h(a.shape(0), a.shape(1));
        auto v = a.unchecked<2>();
        for (py::ssize_t i = 0; i < a.shape(0); ++i)
            for (py::ssize_t j = 0; j < a.shape(1); ++j) h(i, j) = v(i, j);
        return {h};
    }
    if (a.ndim() != 3) throw Error(ErrorCode::DimensionMismatch, "expected an (m, r) or (n, m, r) array");
    std::vector<ComplexMatrix> out;
    auto v = a.unchecked<3>();
    for (py::ssize_t k = 0; k < a.shape(0); ++k) {
        ComplexMatrix h(a.shape(1), a.shape(2));
        for (py::ssize_t i = 0; i < a.shape(1); ++i)
            for (py::ssize_t j = 0; j < a.shape(2); ++j) h(i, j) = v(k, i, j);
        out.push_back(std::move(h));
    }
    return out;
}

py::dict report_dict(const VerificationReport& r) {
    py::dict d;
    d["check_name"] = r.check_name;
    d["n_samples"] = r.n_samples;
    d["estimate"] = r.estimate;
    d["std_error"] = r.std_error;
    d["target"] = r.target;
    d["k"] = r.k;
    d["passed"] = r.passed;
    d["details"] = r.details;
    return d;
}

py::dict result_dict(const TwoSampleResult& r) {
    py::dict d;
    d["check_name"] = r.check_name;
    d["statistic"] = r.statistic;
    d["critical_value"] = r.critical_value;
    d["n1"] = r.n1;
    d["n2"] = r.n2;
    d["functional"] = r.functional_description;
    d["level"] = r.level;
    d["passed"] = r.passed;
    d["details"] = r.details;
    py::list comps;
    for (const auto& c : r.components) comps.append(result_dict(c));
    d["components"] = comps;
    return d;
}

CheckOptions options(double level, double k) {
    CheckOptions o;
    o.level = level;
    o.k = k;
    return o;
}

} // namespace

PYBIND11_MODULE(_cmacg, mod) {
    mod.doc() = "Matrix angular central Gaussian distributions on the complex Stiefel manifold";

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
    error_type.call_once_and_store_result([&]() {
        return py::object(py::exception<Error>(mod, "CmacgError", PyExc_ValueError));
    });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const py::object& type = error_type.get_stored();
            py::object inst = type(e.what());
            inst.attr("code") = std::string(to_string(e.code()));
            inst.attr("residual") = e.residual() ? py::cast(*e.residual()) : py::none();
            PyErr_SetObject(type.ptr(), inst.ptr());
        }
    });

    py::class_<RngState>(mod, "RngState")
        .def(py::init<std::uint64_t>(), py::arg("seed") = 0)
        .def_property_readonly("seed", &RngState::seed)
        .def("next_u64", &RngState::next_u64)
        .def("normal", &RngState::normal)
        .def("uniform", &RngState::uniform)
        .def("split", &RngState::split, py::arg("stream"));
    mod.def("derive_seed", &derive_seed, py::arg("master"), py::arg("stream"));

    // Linear algebra
    mod.def(
        "sqrt_newton",
        [](const ComplexMatrix& a, double tol, int max_iter) {
            return hermitian_sqrt_newton(HermitianPD(a), {tol, max_iter}).matrix();
        },
        py::arg("a"), py::arg("tol") = 1e-12, py::arg("max_iter") = 100);
    mod.def("sqrt_eig", [](const ComplexMatrix& a) { return hermitian_sqrt_eig(HermitianPD(a)).matrix(); },
            py::arg("a"));
    mod.def("inv_sqrt", [](const ComplexMatrix& a) { return hermitian_inv_sqrt(HermitianPD(a)).matrix(); },
            py::arg("a"));
    mod.def(
        "polar",
        [](const ComplexMatrix& z) {
            PolarDecomposition pd = polar_decompose(z);
            return py::make_tuple(pd.h.frame(), pd.t.matrix());
        },
        py::arg("z"), "Returns (h, t) with z = h t^(1/2), h semi-unitary and t = z'z.");
    mod.def("logdet_hpd", [](const ComplexMatrix& a) { return logdet_hpd(HermitianPD(a)); }, py::arg("a"));

    // Special functions
    mod.def("log_cmv_gamma", &log_cmv_gamma, py::arg("r"), py::arg("a"));
    mod.def(
        "log_stiefel_volume", [](std::size_t m, std::size_t r) { return log_stiefel_volume(ManifoldDims(m, r)); },
        py::arg("m"), py::arg("r"));

    // Distributions
    mod.def(
        "sample_cmacg",
        [](const ComplexMatrix& p, std::size_t r, std::size_t n, RngState& rng) {
            const CmacgParams params(HermitianPD(p), r);
            std::vector<StiefelPoint> draws;
            draws.reserve(n);
            for (std::size_t i = 0; i < n; ++i) draws.push_back(sample_cmacg(params, rng));
            return to_array(draws, params.m(), r);
        },
        py::arg("p"), py::arg("r"), py::arg("n"), py::arg("rng"));
    mod.def(
        "sample_uniform",
        [](std::size_t m, std::size_t r, std::size_t n, RngState& rng) {
            const ManifoldDims dims(m, r);
            std::vector<StiefelPoint> draws;
            draws.reserve(n);
            for (std::size_t i = 0; i < n; ++i) draws.push_back(sample_uniform_stiefel(dims, rng));
            return to_array(draws, m, r);
        },
        py::arg("m"), py::arg("r"), py::arg("n"), py::arg("rng"));
    mod.def(
        "sample_complex_normal",
        [](const ComplexMatrix& p, std::size_t r, RngState& rng) {
            return sample_complex_matrix_normal(ComplexMatrixNormalParams(HermitianPD(p), r), rng);
        },
        py::arg("p"), py::arg("r"), py::arg("rng"));
    mod.def(
        "log_density",
        [](const ComplexMatrix& p, const Frames& h) {
            const auto frames = from_array(h);
            if (frames.empty()) return std::vector<double>{};
            const CmacgParams params(HermitianPD(p), static_cast<std::size_t>(frames.front().cols()));
            std::vector<double> out;
            for (const auto& f : frames) out.push_back(cmacg_log_density(params, StiefelPoint(f, kDensityManifoldTol)));
            return out;
        },
        py::arg("p"), py::arg("h"), "Log-density of each frame relative to the normalized invariant measure.");
    mod.def(
        "log_density_transformed",
        [](const ComplexMatrix& p, const ComplexMatrix& b, const ComplexMatrix& h) {
            const CmacgParams params(HermitianPD(p), static_cast<std::size_t>(h.cols()));
            return cmacg_log_density_of_transformed(params, b, StiefelPoint(h, kDensityManifoldTol));
        },
        py::arg("p"), py::arg("b"), py::arg("h"));
    mod.def("projection_matrix", [](const ComplexMatrix& h) { return projection_matrix(StiefelPoint(h)); },
            py::arg("h"));

    // Verification checks
    mod.def(
        "normalization_check",
        [](const ComplexMatrix& p, std::size_t r, std::size_t n, RngState& rng, double level, double k) {
            return report_dict(normalization_check(CmacgParams(HermitianPD(p), r), n, rng, options(level, k)));
        },
        py::arg("p"), py::arg("r"), py::arg("n"), py::arg("rng"), py::arg("level") = 0.01, py::arg("k") = 4.0);
    mod.def(
        "unitary_invariance_check",
        [](const ComplexMatrix& p, std::size_t r, std::size_t n, RngState& rng, double level, double k) {
            return result_dict(unitary_invariance_check(CmacgParams(HermitianPD(p), r), n, rng, options(level, k)));
        },
        py::arg("p"), py::arg("r"), py::arg("n"), py::arg("rng"), py::arg("level") = 0.01, py::arg("k") = 4.0);
    mod.def(
        "corollary_check",
        [](const ComplexMatrix& p, std::size_t r, const ComplexMatrix& b, std::size_t n, RngState& rng, double level,
           double k) {
            return result_dict(corollary_check(CmacgParams(HermitianPD(p), r), b, n, rng, options(level, k)));
        },
        py::arg("p"), py::arg("r"), py::arg("b"), py::arg("n"), py::arg("rng"), py::arg("level") = 0.01,
        py::arg("k") = 4.0);
    mod.def(
        "general_class_check",
        [](const ComplexMatrix& p, std::size_t r, std::size_t n, RngState& rng, double level, double k) {
            return result_dict(general_class_check(CmacgParams(HermitianPD(p), r), n, rng, options(level, k)));
        },
        py::arg("p"), py::arg("r"), py::arg("n"), py::arg("rng"), py::arg("level") = 0.01, py::arg("k") = 4.0);
    mod.def(
        "normal_covariance_check",
        [](const ComplexMatrix& p, std::size_t r, std::size_t n, RngState& rng, double k) {
            CheckOptions o;
            o.k = k;
            return report_dict(normal_covariance_check(ComplexMatrixNormalParams(HermitianPD(p), r), n, rng, o));
        },
        py::arg("p"), py::arg("r"), py::arg("n"), py::arg("rng"), py::arg("k") = 4.0);
    mod.def(
        "ks_two_sample",
        [](const std::vector<double>& x, const std::vector<double>& y, double level) {
            return result_dict(ks_two_sample(x, y, level));
        },
        py::arg("x"), py::arg("y"), py::arg("level") = 0.01);

    mod.attr("__version__") = CMACG_VERSION;
}
