#include "cmacg/distributions.hpp"

#include <cmath>
#include <sstream>

namespace cmacg {

// ---------------------------------------------------------------------------
// Complex matrix normal

RealMatrix stacked_real_covariance(const HermitianPD& p) {
    const Eigen::Index m = static_cast<Eigen::Index>(p.dim());
    const RealMatrix pr = p.matrix().real();
    const RealMatrix pi = p.matrix().imag();
    RealMatrix cov(2 * m, 2 * m);
    cov << pr, -pi, pi, pr;
    return 0.5 * cov;
}

ComplexMatrixNormalParams::ComplexMatrixNormalParams(HermitianPD column_cov, std::size_t r)
    : column_cov_(std::move(column_cov)), r_(r) {
    if (r_ < 1) throw Error(ErrorCode::InvalidArgument, "matrix normal needs r >= 1");
    Eigen::LLT<RealMatrix> llt(stacked_real_covariance(column_cov_));
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::CholeskyFailure, "stacked real covariance is not positive definite");
    chol_ = llt.matrixL();
}

ComplexMatrix sample_complex_matrix_normal(const ComplexMatrixNormalParams& params, RngState& rng) {
    const Eigen::Index m = static_cast<Eigen::Index>(params.m());
    const Eigen::Index r = static_cast<Eigen::Index>(params.r());
    const RealMatrix& l = params.real_cholesky();

    ComplexMatrix z(m, r);
    RealVector xi(2 * m);
    for (Eigen::Index j = 0; j < r; ++j) {
        for (Eigen::Index k = 0; k < 2 * m; ++k) xi(k) = rng.normal();
        const RealVector v = l.triangularView<Eigen::Lower>() * xi;
        for (Eigen::Index i = 0; i < m; ++i) z(i, j) = Complex(v(i), v(m + i));
    }
    return z;
}

// ---------------------------------------------------------------------------
// CMACG

namespace {

HermitianPD validated_param(HermitianPD p, std::size_t r) {
    if (r < 1 || r > p.dim()) {
        std::ostringstream os;
        os << "CMACG needs m >= r >= 1, got m=" << p.dim() << " r=" << r;
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
    if (p.condition() > kMaxParamCondition) {
        std::ostringstream os;
        os << "parameter condition number " << p.condition() << " exceeds " << kMaxParamCondition;
        throw Error(ErrorCode::IllConditioned, os.str(), p.condition());
    }
    return p;
}

HermitianPD inverse_hpd(const HermitianPD& p) {
    const Eigen::Index m = static_cast<Eigen::Index>(p.dim());
    return HermitianPD(Eigen::LLT<ComplexMatrix>(p.matrix()).solve(ComplexMatrix::Identity(m, m)));
}

} // namespace

CmacgParams::CmacgParams(HermitianPD p, std::size_t r)
    : p_(validated_param(std::move(p), r)), r_(r), p_inv_(inverse_hpd(p_)), logdet_p_(logdet_hpd(p_)),
      chol_(Eigen::LLT<ComplexMatrix>(p_.matrix()).matrixL()), normal_(p_, r) {}

CmacgParams CmacgParams::uniform(const ManifoldDims& d) {
    return CmacgParams(HermitianPD::identity(d.m()), d.r());
}

double cmacg_log_density(const CmacgParams& params, const StiefelPoint& h) {
    if (h.m() != params.m() || h.r() != params.r()) {
        std::ostringstream os;
        os << "frame is " << h.m() << "x" << h.r() << ", parameter expects " << params.m() << "x"
           << params.r();
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
    const double res = semi_unitarity_residual(h.frame());
    if (res > kDensityManifoldTol)
        throw Error(ErrorCode::NotOnManifold, "frame is not semi-unitary", res);

    // H' P^{-1} H = W' W with W = L^{-1} H.
    const ComplexMatrix w = params.p_cholesky().triangularView<Eigen::Lower>().solve(h.frame());
    ComplexMatrix gram = w.adjoint() * w;
    gram = 0.5 * (gram + gram.adjoint()).eval();
    Eigen::LLT<ComplexMatrix> llt(gram);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::CholeskyFailure, "H' P^{-1} H is not positive definite");
    double logdet_gram = 0.0;
    for (Eigen::Index i = 0; i < gram.rows(); ++i)
        logdet_gram += std::log(llt.matrixLLT()(i, i).real());
    logdet_gram *= 2.0;

    const double m = static_cast<double>(params.m());
    const double r = static_cast<double>(params.r());
    // + 0.0 folds a signed zero into +0.
    return -r * params.logdet_p() - m * logdet_gram + 0.0;
}

StiefelPoint sample_cmacg(const CmacgParams& params, RngState& rng) {
    try {
        return polar_decompose(sample_complex_matrix_normal(params.normal(), rng)).h;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::RankDeficient) throw;
    }
    return polar_decompose(sample_complex_matrix_normal(params.normal(), rng)).h;
}

StiefelPoint sample_uniform_stiefel(const ManifoldDims& d, RngState& rng) {
    return sample_cmacg(CmacgParams::uniform(d), rng);
}

ComplexMatrix projection_matrix(const StiefelPoint& h) {
    const double res = semi_unitarity_residual(h.frame());
    if (res > kStiefelTol) throw Error(ErrorCode::NotOnManifold, "frame is not semi-unitary", res);
    ComplexMatrix proj = h.frame() * h.frame().adjoint();
    return 0.5 * (proj + proj.adjoint());
}

// ---------------------------------------------------------------------------
// Linear transformations

void validate_transform(const ComplexMatrix& b, std::size_t m) {
    const Eigen::Index md = static_cast<Eigen::Index>(m);
    if (b.rows() != md || b.cols() != md) {
        std::ostringstream os;
        os << "transform must be " << m << "x" << m << ", got " << b.rows() << "x" << b.cols();
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
    if (!all_finite(b)) throw Error(ErrorCode::SingularTransform, "transform has non-finite entries");
    Eigen::JacobiSVD<ComplexMatrix> svd(b);
    const RealVector& s = svd.singularValues();
    const double ratio = s(0) > 0.0 ? s(s.size() - 1) / s(0) : 0.0;
    if (!(ratio > static_cast<double>(m) * 1e-12))
        throw Error(ErrorCode::SingularTransform, "transform is numerically singular", ratio);
}

CmacgParams transform_parameter(const CmacgParams& params, const ComplexMatrix& b) {
    validate_transform(b, params.m());
    return CmacgParams(HermitianPD(b * params.p().matrix() * b.adjoint()), params.r());
}

double cmacg_log_density_of_transformed(const CmacgParams& params, const ComplexMatrix& b,
                                        const StiefelPoint& h_y) {
    validate_transform(b, params.m());
    if (h_y.m() != params.m() || h_y.r() != params.r())
        throw Error(ErrorCode::DimensionMismatch, "frame dimensions do not match the parameter");
    const double res = semi_unitarity_residual(h_y.frame());
    if (res > kDensityManifoldTol)
        throw Error(ErrorCode::NotOnManifold, "frame is not semi-unitary", res);

    Eigen::PartialPivLU<ComplexMatrix> lu(b);
    const ComplexMatrix w = lu.solve(h_y.frame());
    const PolarDecomposition polar_w = polar_decompose(w);

    double log_abs_det_b = 0.0;
    for (Eigen::Index i = 0; i < b.rows(); ++i) log_abs_det_b += std::log(std::abs(lu.matrixLU()(i, i)));

    const double m = static_cast<double>(params.m());
    const double r = static_cast<double>(params.r());
    // |B'B| = |det B|^2 and W'W is the polar factor t of W.
    return -r * 2.0 * log_abs_det_b - m * logdet_hpd(polar_w.t) + cmacg_log_density(params, polar_w.h);
}

ComplexMatrix random_unitary(std::size_t r, RngState& rng) {
    const Eigen::Index n = static_cast<Eigen::Index>(r);
    ComplexMatrix g(n, n);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = Complex(rng.normal(), rng.normal());
    // The polar factor of a Ginibre matrix is Haar on U(r).
    return polar_decompose(g).h.frame();
}

} // namespace cmacg
