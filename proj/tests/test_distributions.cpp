#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "cmacg/distributions.hpp"
#include "oracles.hpp"

using namespace cmacg;

namespace {

// Per-coordinate SE multiplier for moment checks that compare a dozen or more
// coordinates at once; matches the verification harness default.
constexpr double kSe = 4.0;

ComplexMatrix column(std::initializer_list<Complex> v) {
    ComplexMatrix c(static_cast<Eigen::Index>(v.size()), 1);
    Eigen::Index i = 0;
    for (const auto& x : v) c(i++, 0) = x;
    return c;
}

HermitianPD diag(std::initializer_list<double> v) {
    RealVector d(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) d(i++) = x;
    return HermitianPD::diagonal(d);
}

// log f straight from determinants, via LU rather than Cholesky.
double density_by_determinants(const ComplexMatrix& p, const ComplexMatrix& h) {
    const double m = static_cast<double>(h.rows());
    const double r = static_cast<double>(h.cols());
    const ComplexMatrix mid = h.adjoint() * p.inverse() * h;
    return -r * std::log(std::abs(p.determinant())) - m * std::log(std::abs(mid.determinant()));
}

} // namespace

// ---------------------------------------------------------------------------
// Complex matrix normal

TEST(ComplexNormal, Deterministic) {
    const ComplexMatrixNormalParams params(HermitianPD::identity(2), 1);
    RngState a(42), b(42);
    EXPECT_EQ(sample_complex_matrix_normal(params, a), sample_complex_matrix_normal(params, b));
}

TEST(ComplexNormal, StackedCovarianceIdentity) {
    const std::size_t m = 2;
    const ComplexMatrixNormalParams params(HermitianPD::identity(m), 1);
    RngState rng(42);
    const int n = 200000;
    const Eigen::Index d = 2 * m;
    RealMatrix sum = RealMatrix::Zero(d, d), sq = RealMatrix::Zero(d, d);
    RealVector v(d);
    for (int i = 0; i < n; ++i) {
        const ComplexMatrix z = sample_complex_matrix_normal(params, rng);
        v << z.col(0).real(), z.col(0).imag();
        const RealMatrix o = v * v.transpose();
        sum += o;
        sq += o.cwiseAbs2();
    }
    const RealMatrix est = sum / n;
    const RealMatrix se = ((sq / n - est.cwiseAbs2()) / n).cwiseSqrt();
    const RealMatrix target = 0.5 * RealMatrix::Identity(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            EXPECT_LE(std::abs(est(i, j) - target(i, j)), kSe * se(i, j)) << i << "," << j;
}

TEST(ComplexNormal, ColumnSecondMomentEqualsP) {
    const ComplexMatrixNormalParams params(diag({2.0, 1.0}), 1);
    RngState rng(7);
    const int n = 200000;
    ComplexMatrix sum = ComplexMatrix::Zero(2, 2);
    RealMatrix sq_re = RealMatrix::Zero(2, 2), sq_im = RealMatrix::Zero(2, 2);
    for (int i = 0; i < n; ++i) {
        const ComplexMatrix z = sample_complex_matrix_normal(params, rng);
        const ComplexMatrix o = z * z.adjoint();
        sum += o;
        sq_re += o.real().cwiseAbs2();
        sq_im += o.imag().cwiseAbs2();
    }
    const ComplexMatrix est = sum / static_cast<double>(n);
    const RealMatrix se_re = ((sq_re / n - est.real().cwiseAbs2()) / n).cwiseSqrt();
    const RealMatrix se_im = ((sq_im / n - est.imag().cwiseAbs2()) / n).cwiseSqrt();
    const ComplexMatrix target = diag({2.0, 1.0}).matrix();
    for (Eigen::Index i = 0; i < 2; ++i) {
        for (Eigen::Index j = 0; j < 2; ++j) {
            EXPECT_LE(std::abs(est(i, j).real() - target(i, j).real()), kSe * se_re(i, j));
            if (i != j) EXPECT_LE(std::abs(est(i, j).imag()), kSe * se_im(i, j));
        }
    }
}

TEST(ComplexNormal, StackedCovarianceBlocks) {
    ComplexMatrix p(2, 2);
    p << 2.0, Complex(0, 1), Complex(0, -1), 2.0;
    const RealMatrix cov = stacked_real_covariance(HermitianPD(p));
    RealMatrix expected(4, 4);
    expected << 2, 0, 0, -1,
                0, 2, 1, 0,
                0, 1, 2, 0,
               -1, 0, 0, 2;
    EXPECT_LE((cov - 0.5 * expected).cwiseAbs().maxCoeff(), 0.0);
}

// ---------------------------------------------------------------------------
// Parameters

TEST(CmacgParams, ValidatesAndCaches) {
    std::mt19937_64 gen(1);
    const HermitianPD p(oracle::random_hpd(4, 50.0, gen));
    const CmacgParams params(p, 2);
    EXPECT_LE(max_abs(params.p_inv().matrix() * p.matrix() - ComplexMatrix::Identity(4, 4)), 1e-10);
    EXPECT_NEAR(params.logdet_p(), std::log(p.matrix().determinant().real()), 1e-10);
    const ComplexMatrix& l = params.p_cholesky();
    EXPECT_LE(max_abs(l * l.adjoint() - p.matrix()), 1e-12 * max_abs(p.matrix()));

    EXPECT_THROW(CmacgParams(p, 5), Error);
    EXPECT_THROW(CmacgParams(p, 0), Error);
    try {
        CmacgParams(diag({1.0, 1e11}), 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IllConditioned);
    }
}

// ---------------------------------------------------------------------------
// Density

TEST(Density, HandEvaluatedExamples) {
    const CmacgParams params(diag({2.0, 1.0}), 1);
    EXPECT_NEAR(cmacg_log_density(params, StiefelPoint(column({1.0, 0.0}))), std::log(2.0), 1e-15);
    EXPECT_NEAR(cmacg_log_density(params, StiefelPoint(column({0.0, 1.0}))), -std::log(2.0), 1e-15);

    std::mt19937_64 gen(2);
    const CmacgParams uniform = CmacgParams::uniform({4, 2});
    for (int i = 0; i < 20; ++i)
        EXPECT_NEAR(cmacg_log_density(uniform, StiefelPoint(oracle::random_frame(4, 2, gen))), 0.0, 1e-12);
}

TEST(Density, Errors) {
    const CmacgParams params(diag({2.0, 1.0, 1.0}), 1);
    EXPECT_THROW(cmacg_log_density(params, StiefelPoint(column({1.0, 0.0}))), Error);
    const StiefelPoint loose(column({1.0 + 1e-6, 0.0, 0.0}), 1e-3);
    try {
        cmacg_log_density(params, loose);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotOnManifold);
    }
}

TEST(Density, MatchesDeterminantFormula) {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 300; ++trial) {
        const Eigen::Index m = 1 + trial % 5;
        const Eigen::Index r = 1 + (trial / 5) % m;
        const ComplexMatrix p = oracle::random_hpd(m, 100.0, gen, 0.1 + trial % 7);
        const ComplexMatrix h = oracle::random_frame(m, r, gen);
        const CmacgParams params{HermitianPD(p), static_cast<std::size_t>(r)};
        EXPECT_NEAR(cmacg_log_density(params, StiefelPoint(h)), density_by_determinants(p, h), 1e-9);
    }
}

TEST(Density, InvariancesAndDegeneracies) {
    std::mt19937_64 gen(4);
    for (int trial = 0; trial < 300; ++trial) {
        const Eigen::Index m = 1 + trial % 5;
        const Eigen::Index r = 1 + (trial / 5) % m;
        const ComplexMatrix p = oracle::random_hpd(m, 1e3, gen);
        const StiefelPoint h(oracle::random_frame(m, r, gen));
        const CmacgParams params{HermitianPD(p), static_cast<std::size_t>(r)};
        const double base = cmacg_log_density(params, h);

        const ComplexMatrix q = oracle::haar_unitary(r, gen);
        EXPECT_NEAR(cmacg_log_density(params, h.right_multiply(q)), base, 1e-10);

        for (double c : {1e-3, 1.0, 1e3}) {
            const CmacgParams scaled{HermitianPD(c * p), static_cast<std::size_t>(r)};
            EXPECT_NEAR(cmacg_log_density(scaled, h), base, 1e-10);
        }
        const CmacgParams uniform = CmacgParams::uniform({static_cast<std::size_t>(m), static_cast<std::size_t>(r)});
        EXPECT_NEAR(cmacg_log_density(uniform, h), 0.0, 1e-12);

        const CmacgParams square{HermitianPD(p), static_cast<std::size_t>(m)};
        EXPECT_NEAR(cmacg_log_density(square, StiefelPoint(oracle::haar_unitary(m, gen))), 0.0, 1e-11);
    }
}

// ---------------------------------------------------------------------------
// Sampling

TEST(SampleCmacg, DeterministicAndOnManifold) {
    const CmacgParams params(diag({3.0, 2.0, 1.0}), 2);
    RngState a(9), b(9);
    for (int i = 0; i < 100; ++i) {
        const StiefelPoint ha = sample_cmacg(params, a);
        const StiefelPoint hb = sample_cmacg(params, b);
        EXPECT_EQ(ha.frame(), hb.frame());
        EXPECT_LE(semi_unitarity_residual(ha.frame()), 1e-10);
    }
}

TEST(SampleCmacg, SquareFrameHasUnitDensity) {
    std::mt19937_64 gen(5);
    const CmacgParams params(HermitianPD(oracle::random_hpd(3, 20.0, gen)), 3);
    RngState rng(10);
    for (int i = 0; i < 200; ++i) EXPECT_NEAR(cmacg_log_density(params, sample_cmacg(params, rng)), 0.0, 1e-12);
}

TEST(SampleCmacg, UniformFirstModulusIsUniform) {
    // For H uniform on the unit sphere of C^2, |h_1|^2 ~ Beta(1, 1).
    const CmacgParams params = CmacgParams::uniform({2, 1});
    RngState rng(11);
    const int n = 100000;
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) u[i] = std::norm(sample_cmacg(params, rng).frame()(0, 0));
    std::sort(u.begin(), u.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i)
        d = std::max({d, std::abs((i + 1.0) / n - u[i]), std::abs(static_cast<double>(i) / n - u[i])});
    EXPECT_LT(d, 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST(SampleUniform, MeanProjection) {
    const std::size_t m = 3, r = 2;
    RngState rng(12);
    const int n = 100000;
    ComplexMatrix sum = ComplexMatrix::Zero(m, m);
    RealMatrix sq_re = RealMatrix::Zero(m, m), sq_im = RealMatrix::Zero(m, m);
    for (int i = 0; i < n; ++i) {
        const StiefelPoint h = sample_uniform_stiefel({m, r}, rng);
        EXPECT_LE(semi_unitarity_residual(h.frame()), 1e-10);
        const ComplexMatrix pr = h.frame() * h.frame().adjoint();
        sum += pr;
        sq_re += pr.real().cwiseAbs2();
        sq_im += pr.imag().cwiseAbs2();
    }
    const ComplexMatrix est = sum / static_cast<double>(n);
    const RealMatrix se_re = ((sq_re / n - est.real().cwiseAbs2()) / n).cwiseSqrt();
    const RealMatrix se_im = ((sq_im / n - est.imag().cwiseAbs2()) / n).cwiseSqrt();
    const double target = static_cast<double>(r) / static_cast<double>(m);
    for (Eigen::Index i = 0; i < 3; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) {
            EXPECT_LE(std::abs(est(i, j).real() - (i == j ? target : 0.0)), kSe * se_re(i, j)) << i << j;
            if (i != j) EXPECT_LE(std::abs(est(i, j).imag()), kSe * se_im(i, j)) << i << j;
        }
    }
}

// ---------------------------------------------------------------------------
// Projection

TEST(Projection, ExamplesAndProperties) {
    ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
    expected(0, 0) = 1.0;
    EXPECT_EQ(projection_matrix(StiefelPoint(column({1.0, 0.0}))), expected);

    std::mt19937_64 gen(6);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index m = 1 + trial % 6;
        const Eigen::Index r = 1 + (trial / 6) % m;
        const StiefelPoint h(oracle::random_frame(m, r, gen));
        const ComplexMatrix pr = projection_matrix(h);
        EXPECT_NEAR(pr.trace().real(), static_cast<double>(r), 1e-9);
        EXPECT_LE(max_abs(pr * pr - pr), 1e-9);
        EXPECT_EQ(max_abs(pr - pr.adjoint()), 0.0);
        const ComplexMatrix q = oracle::haar_unitary(r, gen);
        EXPECT_LE(max_abs_diff(projection_matrix(h.right_multiply(q)), pr), 1e-10);
    }
}

// ---------------------------------------------------------------------------
// Linear transformations

TEST(Transform, ParameterExamples) {
    std::mt19937_64 gen(7);
    const ComplexMatrix p = oracle::random_hpd(3, 10.0, gen);
    const CmacgParams params{HermitianPD(p), 2};
    EXPECT_LE(max_abs_diff(transform_parameter(params, ComplexMatrix::Identity(3, 3)).p().matrix(), p), 1e-15);

    const double c = 2.5;
    const CmacgParams scaled = transform_parameter(params, c * ComplexMatrix::Identity(3, 3));
    EXPECT_LE(max_abs_diff(scaled.p().matrix(), c * c * p), 1e-12);
    for (int i = 0; i < 20; ++i) {
        const StiefelPoint h(oracle::random_frame(3, 2, gen));
        EXPECT_NEAR(cmacg_log_density(scaled, h), cmacg_log_density(params, h), 1e-10);
    }

    const CmacgParams id2 = CmacgParams::uniform({2, 1});
    ComplexMatrix b = ComplexMatrix::Zero(2, 2);
    b(0, 0) = 2.0;
    b(1, 1) = 1.0;
    EXPECT_EQ(transform_parameter(id2, b).p().matrix(), diag({4.0, 1.0}).matrix());
}

TEST(Transform, SingularRejected) {
    const CmacgParams params = CmacgParams::uniform({2, 1});
    ComplexMatrix b(2, 2);
    b << 1.0, 2.0, 2.0, 4.0;
    try {
        transform_parameter(params, b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SingularTransform);
    }
    EXPECT_THROW(cmacg_log_density_of_transformed(params, b, StiefelPoint(column({1.0, 0.0}))), Error);
    EXPECT_THROW(transform_parameter(params, ComplexMatrix::Identity(3, 3)), Error);
}

TEST(Transform, ChangeOfVariablesRoute) {
    const CmacgParams uniform = CmacgParams::uniform({2, 1});
    ComplexMatrix b = ComplexMatrix::Zero(2, 2);
    b(0, 0) = 2.0;
    b(1, 1) = 1.0;
    const StiefelPoint e1(column({1.0, 0.0}));
    // |B P B'| = 4 and e1' (B P B')^{-1} e1 = 1/4: -log 4 + 2 log 4.
    EXPECT_NEAR(cmacg_log_density_of_transformed(uniform, b, e1), std::log(4.0), 1e-14);
    EXPECT_NEAR(cmacg_log_density(transform_parameter(uniform, b), e1), std::log(4.0), 1e-14);

    std::mt19937_64 gen(8);
    for (int trial = 0; trial < 300; ++trial) {
        const Eigen::Index m = 1 + trial % 4;
        const Eigen::Index r = 1 + (trial / 4) % m;
        const CmacgParams params{HermitianPD(oracle::random_hpd(m, 50.0, gen)), static_cast<std::size_t>(r)};
        const ComplexMatrix bb = oracle::ginibre(m, m, gen) + ComplexMatrix::Identity(m, m);
        const StiefelPoint h(oracle::random_frame(m, r, gen));
        EXPECT_NEAR(cmacg_log_density_of_transformed(params, bb, h),
                    cmacg_log_density(transform_parameter(params, bb), h), 1e-9);
        EXPECT_NEAR(cmacg_log_density_of_transformed(params, ComplexMatrix::Identity(m, m), h),
                    cmacg_log_density(params, h), 1e-12);
    }
}

TEST(RandomUnitary, IsUnitary) {
    RngState rng(13);
    for (std::size_t r = 1; r <= 6; ++r) EXPECT_LE(semi_unitarity_residual(random_unitary(r, rng)), 1e-12);
}
