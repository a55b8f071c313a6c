#pragma once

// Dense complex matrix primitives: validated Hermitian positive-definite and
// semi-unitary wrappers, Hermitian square roots, polar decomposition.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>

#include "cmacg/error.hpp"

namespace cmacg {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Tolerance on max|H'H - I| for a frame to count as semi-unitary.
inline constexpr double kStiefelTol = 1e-10;
/// Relative tolerance on input asymmetry accepted (and then symmetrized away)
/// by HermitianPD.
inline constexpr double kHermitianInputTol = 1e-8;
/// Relative eigenvalue floor: lambda_min > dim * kPdRelTol * lambda_max.
inline constexpr double kPdRelTol = 1e-12;

double max_abs(const ComplexMatrix& a);
bool all_finite(const ComplexMatrix& a);

/// Conjugate transpose.
inline ComplexMatrix adjoint(const ComplexMatrix& a) { return a.adjoint(); }

/// Hermitian positive-definite matrix. Construction symmetrizes the input to
/// (A + A')/2 and validates positive definiteness; the extreme eigenvalues are
/// kept so callers can query the condition number without refactoring.
class HermitianPD {
public:
    explicit HermitianPD(const ComplexMatrix& a);

    static HermitianPD identity(std::size_t dim);
    static HermitianPD diagonal(const RealVector& d);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(a_.rows()); }
    const ComplexMatrix& matrix() const noexcept { return a_; }
    double min_eigenvalue() const noexcept { return lambda_min_; }
    double max_eigenvalue() const noexcept { return lambda_max_; }
    double condition() const noexcept { return lambda_max_ / lambda_min_; }

private:
    ComplexMatrix a_;
    double lambda_min_ = 0.0;
    double lambda_max_ = 0.0;
};

/// m x r matrix with orthonormal columns, m >= r.
class StiefelPoint {
public:
    explicit StiefelPoint(ComplexMatrix frame, double tol = kStiefelTol);

    std::size_t m() const noexcept { return static_cast<std::size_t>(h_.rows()); }
    std::size_t r() const noexcept { return static_cast<std::size_t>(h_.cols()); }
    const ComplexMatrix& frame() const noexcept { return h_; }

    /// H * Q for an r x r unitary Q; the result is re-validated.
    StiefelPoint right_multiply(const ComplexMatrix& q) const;

private:
    ComplexMatrix h_;
};

/// max|H'H - I_r| entrywise.
double semi_unitarity_residual(const ComplexMatrix& h);

struct SqrtOptions {
    double tol = 1e-12;
    int max_iter = 100;
};

/// Principal square root by the scaled Denman-Beavers (coupled Newton)
/// iteration. Throws NonConvergence when max|S*S - A| > tol * max(1, max|A|)
/// after max_iter steps.
HermitianPD hermitian_sqrt_newton(const HermitianPD& a, SqrtOptions opts = {});

/// Principal square root from the Hermitian eigendecomposition.
HermitianPD hermitian_sqrt_eig(const HermitianPD& a);

/// Condition number above which hermitian_inv_sqrt refuses to work.
inline constexpr double kInvSqrtMaxCondition = 1e12;

/// A^{-1/2}, the inverse iterate of the Denman-Beavers iteration.
HermitianPD hermitian_inv_sqrt(const HermitianPD& a, SqrtOptions opts = {});

struct PolarDecomposition {
    StiefelPoint h;  ///< orientation Z (Z'Z)^{-1/2}
    HermitianPD t;   ///< Z'Z
};

/// Z = H T^{1/2}. Throws RankDeficient if Z is numerically rank deficient.
PolarDecomposition polar_decompose(const ComplexMatrix& z);

/// log det A via Cholesky.
double logdet_hpd(const HermitianPD& a);

/// Maximum over |A_ij - B_ij|.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

} // namespace cmacg
