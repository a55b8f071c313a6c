#include "cmacg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cmacg {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotOnManifold: return "NotOnManifold";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::SingularTransform: return "SingularTransform";
    case ErrorCode::CholeskyFailure: return "CholeskyFailure";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InsufficientSample: return "InsufficientSample";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

double max_abs(const ComplexMatrix& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

bool all_finite(const ComplexMatrix& a) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const Complex v = a.data()[i];
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(ErrorCode::DimensionMismatch, "max_abs_diff operands differ in shape");
    return max_abs(a - b);
}

// ---------------------------------------------------------------------------
// HermitianPD

HermitianPD::HermitianPD(const ComplexMatrix& a) {
    if (a.rows() == 0 || a.rows() != a.cols()) {
        std::ostringstream os;
        os << "expected a non-empty square matrix, got " << a.rows() << "x" << a.cols();
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
    if (!all_finite(a)) throw Error(ErrorCode::InvalidArgument, "matrix has non-finite entries");

    const double scale = std::max(1.0, max_abs(a));
    const double asym = max_abs(a - a.adjoint());
    if (asym > kHermitianInputTol * scale)
        throw Error(ErrorCode::NotHermitian, "max|A - A'| exceeds tolerance", asym);

    a_ = 0.5 * (a + a.adjoint());

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a_, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw Error(ErrorCode::NotPositiveDefinite, "eigenvalue computation failed");
    lambda_min_ = es.eigenvalues().minCoeff();
    lambda_max_ = es.eigenvalues().maxCoeff();
    const double floor = static_cast<double>(dim()) * kPdRelTol * lambda_max_;
    if (!(lambda_max_ > 0.0) || !(lambda_min_ > floor)) {
        std::ostringstream os;
        os << "smallest eigenvalue " << lambda_min_ << " not above " << floor;
        throw Error(ErrorCode::NotPositiveDefinite, os.str(), lambda_min_);
    }
}

HermitianPD HermitianPD::identity(std::size_t dim) {
    return HermitianPD(ComplexMatrix::Identity(static_cast<Eigen::Index>(dim),
                                               static_cast<Eigen::Index>(dim)));
}

HermitianPD HermitianPD::diagonal(const RealVector& d) {
    return HermitianPD(d.cast<Complex>().asDiagonal().toDenseMatrix());
}

// ---------------------------------------------------------------------------
// StiefelPoint

double semi_unitarity_residual(const ComplexMatrix& h) {
    const ComplexMatrix g = h.adjoint() * h;
    return max_abs(g - ComplexMatrix::Identity(g.rows(), g.cols()));
}

StiefelPoint::StiefelPoint(ComplexMatrix frame, double tol) : h_(std::move(frame)) {
    if (h_.rows() == 0 || h_.cols() == 0 || h_.rows() < h_.cols()) {
        std::ostringstream os;
        os << "Stiefel frame must be m x r with m >= r >= 1, got " << h_.rows() << "x" << h_.cols();
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
    if (!all_finite(h_)) throw Error(ErrorCode::InvalidArgument, "frame has non-finite entries");
    const double res = semi_unitarity_residual(h_);
    if (!(res <= tol)) {
        std::ostringstream os;
        os << "max|H'H - I| = " << res << " exceeds " << tol;
        throw Error(ErrorCode::NotOnManifold, os.str(), res);
    }
}

StiefelPoint StiefelPoint::right_multiply(const ComplexMatrix& q) const {
    if (q.rows() != h_.cols() || q.cols() != h_.cols())
        throw Error(ErrorCode::DimensionMismatch, "right factor must be r x r");
    return StiefelPoint(h_ * q);
}

// ---------------------------------------------------------------------------
// Square roots

namespace {

double log_abs_det(const Eigen::PartialPivLU<ComplexMatrix>& lu) {
    const ComplexMatrix& f = lu.matrixLU();
    double s = 0.0;
    for (Eigen::Index i = 0; i < f.rows(); ++i) s += std::log(std::abs(f(i, i)));
    return s;
}

struct DenmanBeavers {
    ComplexMatrix sqrt;
    ComplexMatrix inv_sqrt;
    double residual;
    int iterations;
};

// Coupled iteration Y_{k+1} = (mu Y + Z^{-1}/mu)/2, Z_{k+1} = (mu Z + Y^{-1}/mu)/2
// with Y_0 = A, Z_0 = I, so that Y -> A^{1/2} and Z -> A^{-1/2}. The
// determinantal scale mu = |det Y det Z|^{-1/(2n)} is switched off once the
// relative step falls below 1e-2, after which the iteration converges
// quadratically.
DenmanBeavers denman_beavers(const ComplexMatrix& a, const SqrtOptions& opts) {
    const Eigen::Index n = a.rows();
    const double target = opts.tol * std::max(1.0, max_abs(a));

    ComplexMatrix y = a;
    ComplexMatrix z = ComplexMatrix::Identity(n, n);
    bool scaling = true;

    DenmanBeavers best{y, z, max_abs(y * y - a), 0};
    if (best.residual <= target) return best;

    for (int k = 1; k <= opts.max_iter; ++k) {
        Eigen::PartialPivLU<ComplexMatrix> lu_y(y);
        Eigen::PartialPivLU<ComplexMatrix> lu_z(z);
        double mu = 1.0;
        if (scaling) {
            mu = std::exp(-(log_abs_det(lu_y) + log_abs_det(lu_z)) / (2.0 * static_cast<double>(n)));
        }
        ComplexMatrix y_next = 0.5 * (mu * y + lu_z.inverse() / mu);
        ComplexMatrix z_next = 0.5 * (mu * z + lu_y.inverse() / mu);
        y_next = 0.5 * (y_next + y_next.adjoint()).eval();
        z_next = 0.5 * (z_next + z_next.adjoint()).eval();

        const double step = max_abs(y_next - y) / std::max(max_abs(y_next), std::numeric_limits<double>::min());
        if (step < 1e-2) scaling = false;

        y = std::move(y_next);
        z = std::move(z_next);

        const double res = max_abs(y * y - a);
        if (!std::isfinite(res)) break;
        if (res < best.residual) best = {y, z, res, k};
        if (res <= target) return best;
        // Converged to rounding level without meeting the tolerance.
        if (!scaling && step < 4.0 * std::numeric_limits<double>::epsilon()) break;
    }
    return best;
}

ComplexMatrix eig_function(const ComplexMatrix& a, double (*f)(double)) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
    const RealVector mapped = es.eigenvalues().unaryExpr(f);
    const ComplexMatrix& v = es.eigenvectors();
    return v * mapped.cast<Complex>().asDiagonal() * v.adjoint();
}

// Full Newton correction X <- X + E with X E + E X = A - X^2, solved through
// the Kronecker form (I (x) X + X^T (x) I) vec(E) = vec(A - X^2). The coupled
// iteration stalls near sqrt(cond(A)) * eps relative residual because it
// inverts Z each step; this step is limited only by cond(X) times |E|.
constexpr Eigen::Index kMaxCorrectionDim = 40;

void newton_correct(const ComplexMatrix& a, DenmanBeavers& db, double target) {
    const Eigen::Index n = a.rows();
    if (n > kMaxCorrectionDim) return;
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    for (int step = 0; step < 3 && db.residual > target; ++step) {
        const ComplexMatrix& x = db.sqrt;
        const ComplexMatrix rhs = a - x * x;
        ComplexMatrix k = ComplexMatrix::Zero(n * n, n * n);
        for (Eigen::Index j = 0; j < n; ++j) {
            k.block(j * n, j * n, n, n) += x;
            for (Eigen::Index i = 0; i < n; ++i) k.block(i * n, j * n, n, n) += x(j, i) * id;
        }
        const Eigen::VectorXcd e = k.partialPivLu().solve(rhs.reshaped());
        ComplexMatrix next = x + e.reshaped(n, n);
        next = 0.5 * (next + next.adjoint()).eval();
        const double res = max_abs(next * next - a);
        if (!(res < db.residual)) return;
        db.sqrt = std::move(next);
        db.residual = res;
    }
}

} // namespace

HermitianPD hermitian_sqrt_newton(const HermitianPD& a, SqrtOptions opts) {
    if (!(opts.tol > 0.0) || opts.max_iter < 1)
        throw Error(ErrorCode::InvalidArgument, "tol must be positive and max_iter >= 1");
    DenmanBeavers db = denman_beavers(a.matrix(), opts);
    const double target = opts.tol * std::max(1.0, max_abs(a.matrix()));
    newton_correct(a.matrix(), db, target);
    if (!(db.residual <= target)) {
        std::ostringstream os;
        os << "square root residual " << db.residual << " above " << target << " after "
           << opts.max_iter << " iterations";
        throw Error(ErrorCode::NonConvergence, os.str(), db.residual);
    }
    return HermitianPD(db.sqrt);
}

HermitianPD hermitian_sqrt_eig(const HermitianPD& a) {
    return HermitianPD(eig_function(a.matrix(), [](double x) { return std::sqrt(x); }));
}

HermitianPD hermitian_inv_sqrt(const HermitianPD& a, SqrtOptions opts) {
    if (a.condition() > kInvSqrtMaxCondition) {
        std::ostringstream os;
        os << "condition number " << a.condition() << " exceeds " << kInvSqrtMaxCondition;
        throw Error(ErrorCode::IllConditioned, os.str(), a.condition());
    }
    DenmanBeavers db = denman_beavers(a.matrix(), opts);
    const double target = opts.tol * std::max(1.0, max_abs(a.matrix()));
    if (!(db.residual <= target))
        throw Error(ErrorCode::NonConvergence, "inverse square root iteration did not converge",
                    db.residual);
    return HermitianPD(db.inv_sqrt);
}

// ---------------------------------------------------------------------------
// Polar decomposition

PolarDecomposition polar_decompose(const ComplexMatrix& z) {
    const Eigen::Index m = z.rows();
    const Eigen::Index r = z.cols();
    if (m == 0 || r == 0 || m < r) {
        std::ostringstream os;
        os << "polar decomposition needs m >= r >= 1, got " << m << "x" << r;
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
    if (!all_finite(z)) throw Error(ErrorCode::InvalidArgument, "matrix has non-finite entries");

    ComplexMatrix t_raw = z.adjoint() * z;
    t_raw = 0.5 * (t_raw + t_raw.adjoint()).eval();

    // Singular values of z are the square roots of the eigenvalues of z'z.
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(t_raw, Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().maxCoeff();
    const double lmin = es.eigenvalues().minCoeff();
    const double sigma_ratio = (lmax > 0.0 && lmin > 0.0) ? std::sqrt(lmin / lmax) : 0.0;
    if (!(sigma_ratio > static_cast<double>(m) * 1e-12))
        throw Error(ErrorCode::RankDeficient, "smallest/largest singular value ratio too small",
                    sigma_ratio);

    std::optional<HermitianPD> t;
    try {
        t.emplace(t_raw);
    } catch (const Error& e) {
        throw Error(ErrorCode::RankDeficient, std::string("Z'Z not numerically positive definite: ") + e.what(),
                    sigma_ratio);
    }

    SqrtOptions opts;
    DenmanBeavers db = denman_beavers(t->matrix(), opts);
    ComplexMatrix h = z * db.inv_sqrt;
    // Newton-Schulz steps h <- h (3I - h'h)/2 converge quadratically to the
    // same polar factor and remove the orthonormality loss of order
    // cond(T) * eps left by the inverse square root.
    const ComplexMatrix id = ComplexMatrix::Identity(r, r);
    for (int k = 0; k < 3; ++k) {
        const ComplexMatrix g = h.adjoint() * h;
        const double res = max_abs(g - id);
        if (res <= 1e-15) break;
        if (res < 0.5) {
            h = h * (1.5 * id - 0.5 * g);
        } else {
            h = h * denman_beavers(0.5 * (g + g.adjoint()), opts).inv_sqrt;
        }
    }
    return PolarDecomposition{StiefelPoint(std::move(h)), std::move(*t)};
}

// ---------------------------------------------------------------------------

double logdet_hpd(const HermitianPD& a) {
    const ComplexMatrix& m = a.matrix();
    const RealVector d = m.diagonal().real();
    if (ComplexMatrix(m - ComplexMatrix(m.diagonal().asDiagonal())).isZero(0.0))
        return d.array().log().sum();

    Eigen::LLT<ComplexMatrix> llt(m);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::CholeskyFailure, "Cholesky factorization of a validated HPD matrix failed");
    const ComplexMatrix& l = llt.matrixLLT();
    double s = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) s += std::log(l(i, i).real());
    return 2.0 * s;
}

} // namespace cmacg
