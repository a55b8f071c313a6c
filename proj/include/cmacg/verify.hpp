#pragma once

// Monte Carlo checks of the distributional identities satisfied by CMACG:
// unit mass, right-unitary invariance, the linear-transformation corollary,
// the general elliptical class, and the complex normal construction.
//
// Every check is deterministic given its inputs and the RngState it is
// handed. Sub-streams are derived from one 64-bit value drawn from that
// state, so the caller's generator advances by exactly one draw per check.

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cmacg/distributions.hpp"

namespace cmacg {

/// Mean-based check: passed iff |estimate - target| <= k * std_error.
struct VerificationReport {
    std::string check_name;
    std::size_t n_samples = 0;
    double estimate = 0.0;
    double std_error = 0.0;
    double target = 0.0;
    double k = 4.0;
    bool passed = false;
    std::map<std::string, double> details;
};

/// Statistic-vs-critical-value check. A composite check carries one
/// component per functional; the top level holds the worst ratio.
struct TwoSampleResult {
    std::string check_name;
    double statistic = 0.0;
    double critical_value = 0.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    std::string functional_description;
    double level = 0.01;
    bool passed = false;
    std::map<std::string, double> details;
    std::vector<TwoSampleResult> components;
};

struct CheckOptions {
    /// Family-wise level for KS comparisons; split across functionals
    /// (Bonferroni).
    double level = 0.01;
    /// Standard-error multiplier for mean-based verdicts.
    double k = 4.0;
    /// Randomized projection functionals per two-sample comparison.
    std::size_t n_functionals = 3;
};

struct MixtureOptions {
    double shape = 3.0;
    double rate = 3.0;
    /// w == 1: the mixture collapses to the plain normal.
    bool degenerate = false;
};

inline constexpr std::size_t kMinKsSample = 100;
inline constexpr std::size_t kMinNormalizationSamples = 1000;
inline constexpr std::size_t kMinTwoSampleDraws = 10000;
inline constexpr std::size_t kMinCovarianceDraws = 50000;

/// c(alpha) = sqrt(-ln(alpha/2) / 2), the asymptotic Kolmogorov quantile.
double ks_c_alpha(double level);
double ks_critical_value(double level, std::size_t n1, std::size_t n2);

/// sup |F_x - F_y| against c(level) * sqrt((n1 + n2) / (n1 n2)).
TwoSampleResult ks_two_sample(std::span<const double> x, std::span<const double> y, double level = 0.01);

/// Mean of exp(log f(H)) over uniform H; target 1.
VerificationReport normalization_check(const CmacgParams& params, std::size_t n, RngState& rng,
                                       const CheckOptions& opts = {},
                                       const LogDensityFn& log_density = cmacg_log_density);

/// Compares {H_i} with {H_i Q} for a randomized unitary Q (or the given one).
TwoSampleResult unitary_invariance_check(const CmacgParams& params, std::size_t n, RngState& rng,
                                         const CheckOptions& opts = {});
TwoSampleResult unitary_invariance_check(const CmacgParams& params, std::size_t n, RngState& rng,
                                         const ComplexMatrix& q, const CheckOptions& opts = {});

/// Orientation of B Z (Z normal with column covariance P) against direct
/// CMACG(B P B') draws.
TwoSampleResult corollary_check(const CmacgParams& params, const ComplexMatrix& b, std::size_t n,
                                RngState& rng, const CheckOptions& opts = {});

/// Orientation of X / sqrt(w), X normal and w ~ Gamma(shape, rate), against
/// direct CMACG(P) draws.
TwoSampleResult general_class_check(const CmacgParams& params, std::size_t n, RngState& rng,
                                    const CheckOptions& opts = {}, const MixtureOptions& mix = {});

/// Max entrywise |empirical - target| / SE of the stacked real covariance;
/// estimate is in SE units, target 0, std_error 1.
VerificationReport normal_covariance_check(const ComplexMatrixNormalParams& params, std::size_t n,
                                           RngState& rng, const CheckOptions& opts = {},
                                           const NormalSampler& sampler = sample_complex_matrix_normal);

/// Two-sample comparison of orientation samples through randomized scalar
/// functionals Re tr(A H H') plus the Frobenius distance of mean projections.
TwoSampleResult compare_orientation_samples(std::string check_name, std::span<const StiefelPoint> first,
                                            std::span<const StiefelPoint> second, RngState& rng,
                                            const CheckOptions& opts = {});

/// Random Hermitian matrix with i.i.d. complex normal entries above the diagonal.
ComplexMatrix random_hermitian(std::size_t m, RngState& rng);

} // namespace cmacg
