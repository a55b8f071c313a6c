#pragma once

// Complex matrix normal, CMACG and uniform Stiefel distributions.
//
// Densities on the Stiefel manifold are with respect to the normalized
// invariant measure (total mass one), so the uniform distribution has log
// density 0 everywhere.

#include <cstddef>
#include <functional>

#include "cmacg/linalg.hpp"
#include "cmacg/rng.hpp"
#include "cmacg/special.hpp"

namespace cmacg {

/// Central complex matrix normal mN^C(0, I_r, P): r i.i.d. columns with
/// column covariance P, i.e. E[z z'] = P per column.
class ComplexMatrixNormalParams {
public:
    ComplexMatrixNormalParams(HermitianPD column_cov, std::size_t r);

    std::size_t m() const noexcept { return column_cov_.dim(); }
    std::size_t r() const noexcept { return r_; }
    const HermitianPD& column_cov() const noexcept { return column_cov_; }

    /// Lower Cholesky factor of the 2m x 2m covariance of the stacked
    /// (real; imaginary) column.
    const RealMatrix& real_cholesky() const noexcept { return chol_; }

private:
    HermitianPD column_cov_;
    std::size_t r_;
    RealMatrix chol_;
};

/// (1/2) [[P_R, -P_I], [P_I, P_R]] for P = P_R + i P_I: the covariance of the
/// stacked real and imaginary parts of a circularly-symmetric column with
/// complex covariance P.
RealMatrix stacked_real_covariance(const HermitianPD& p);

/// Largest condition number accepted for a CMACG parameter.
inline constexpr double kMaxParamCondition = 1e10;

/// Validated CMACG(P) parameter with cached inverse, Cholesky factor and
/// log-determinant. P is kept as supplied; no scale normalization.
class CmacgParams {
public:
    CmacgParams(HermitianPD p, std::size_t r);

    static CmacgParams uniform(const ManifoldDims& d);

    std::size_t m() const noexcept { return p_.dim(); }
    std::size_t r() const noexcept { return r_; }
    ManifoldDims dims() const { return ManifoldDims(m(), r_); }
    const HermitianPD& p() const noexcept { return p_; }
    const HermitianPD& p_inv() const noexcept { return p_inv_; }
    double logdet_p() const noexcept { return logdet_p_; }
    /// Lower triangular L with P = L L'.
    const ComplexMatrix& p_cholesky() const noexcept { return chol_; }
    /// Normal law whose orientation is CMACG(P).
    const ComplexMatrixNormalParams& normal() const noexcept { return normal_; }

private:
    HermitianPD p_;
    std::size_t r_;
    HermitianPD p_inv_;
    double logdet_p_;
    ComplexMatrix chol_;
    ComplexMatrixNormalParams normal_;
};

using NormalSampler = std::function<ComplexMatrix(const ComplexMatrixNormalParams&, RngState&)>;
using LogDensityFn = std::function<double(const CmacgParams&, const StiefelPoint&)>;

/// One m x r draw; each column is L * xi with xi standard normal in R^{2m},
/// split into real (top) and imaginary (bottom) halves.
ComplexMatrix sample_complex_matrix_normal(const ComplexMatrixNormalParams& params, RngState& rng);

/// log f(H) = -r log|P| - m log|H' P^{-1} H|.
double cmacg_log_density(const CmacgParams& params, const StiefelPoint& h);

/// Residual above which the density refuses a frame.
inline constexpr double kDensityManifoldTol = 1e-8;

/// Orientation of a mN^C(0, I_r, P) draw. A rank-deficient draw is retried
/// once; a second failure propagates RankDeficient.
StiefelPoint sample_cmacg(const CmacgParams& params, RngState& rng);

StiefelPoint sample_uniform_stiefel(const ManifoldDims& d, RngState& rng);

/// H H': Hermitian, idempotent, trace r. Not positive definite when r < m.
ComplexMatrix projection_matrix(const StiefelPoint& h);

/// Parameter B P B' of the orientation of B Z when Z has orientation CMACG(P).
CmacgParams transform_parameter(const CmacgParams& params, const ComplexMatrix& b);

/// Density of the orientation of Y = B Z evaluated through the
/// change-of-variables route: W = B^{-1} H_Y,
/// log f(H_Y) = -r log|B'B| - m log|W'W| + log f_{CMACG(P)}(H_W).
double cmacg_log_density_of_transformed(const CmacgParams& params, const ComplexMatrix& b,
                                        const StiefelPoint& h_y);

/// Throws SingularTransform unless b is square of size m with
/// sigma_min / sigma_max > m * 1e-12.
void validate_transform(const ComplexMatrix& b, std::size_t m);

/// Haar-distributed r x r unitary matrix.
ComplexMatrix random_unitary(std::size_t r, RngState& rng);

} // namespace cmacg
