#include "cmacg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cmacg {

namespace {

// Sub-stream layout inside a check: one value from the caller's generator,
// then fixed stream indices below.
enum Stream : std::uint64_t { kFunctionals = 0, kFirst = 1, kSecond = 2, kAux = 3 };

struct Lanes {
    explicit Lanes(RngState& rng) : base(rng.next_u64()) {}
    RngState operator()(Stream s) const { return RngState(derive_seed(base, s)); }
    std::uint64_t base;
};

// Running mean and variance.
struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
};

void require_samples(std::size_t n, std::size_t minimum, const char* what) {
    if (n < minimum) {
        std::ostringstream os;
        os << what << " needs n >= " << minimum << ", got " << n;
        throw Error(ErrorCode::InsufficientSample, os.str());
    }
}

// Re tr(A H H') = Re tr(H' A H).
double projection_functional(const ComplexMatrix& a, const ComplexMatrix& h) {
    return (h.adjoint() * a * h).trace().real();
}

// Re tr(A H B H').
double frame_functional(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& h) {
    return (h.adjoint() * a * h * b).trace().real();
}

// Rounding slack for verdicts whose standard error collapses to zero.
constexpr double kRoundoffFloor = 1e-12;

StiefelPoint orientation_with_retry(const std::function<ComplexMatrix()>& draw) {
    try {
        return polar_decompose(draw()).h;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::RankDeficient) throw;
    }
    return polar_decompose(draw()).h;
}

void finish_composite(TwoSampleResult& out) {
    out.passed = true;
    double worst = 0.0;
    for (const auto& c : out.components) {
        out.passed = out.passed && c.passed;
        if (c.critical_value > 0.0) worst = std::max(worst, c.statistic / c.critical_value);
    }
    out.details["worst_ratio"] = worst;
}

} // namespace

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

double ks_c_alpha(double level) {
    if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidArgument, "level must be in (0, 1)");
    return std::sqrt(-0.5 * std::log(0.5 * level));
}

double ks_critical_value(double level, std::size_t n1, std::size_t n2) {
    const double a = static_cast<double>(n1);
    const double b = static_cast<double>(n2);
    return ks_c_alpha(level) * std::sqrt((a + b) / (a * b));
}

TwoSampleResult ks_two_sample(std::span<const double> x, std::span<const double> y, double level) {
    if (x.size() < kMinKsSample || y.size() < kMinKsSample) {
        std::ostringstream os;
        os << "KS test needs at least " << kMinKsSample << " points per sample, got " << x.size()
           << " and " << y.size();
        throw Error(ErrorCode::InsufficientSample, os.str());
    }
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(x.begin(), x.end(), finite) || !std::all_of(y.begin(), y.end(), finite))
        throw Error(ErrorCode::InvalidArgument, "KS samples must be finite");

    std::vector<double> xs(x.begin(), x.end());
    std::vector<double> ys(y.begin(), y.end());
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());

    const double n1 = static_cast<double>(xs.size());
    const double n2 = static_cast<double>(ys.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < xs.size() && j < ys.size()) {
        const double v = std::min(xs[i], ys[j]);
        while (i < xs.size() && xs[i] == v) ++i;
        while (j < ys.size() && ys[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
    }

    TwoSampleResult out;
    out.check_name = "ks_two_sample";
    out.statistic = d;
    out.critical_value = ks_critical_value(level, xs.size(), ys.size());
    out.n1 = xs.size();
    out.n2 = ys.size();
    out.level = level;
    out.passed = d <= out.critical_value;
    return out;
}

// ---------------------------------------------------------------------------

ComplexMatrix random_hermitian(std::size_t m, RngState& rng) {
    const Eigen::Index n = static_cast<Eigen::Index>(m);
    ComplexMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, i) = Complex(rng.normal(), 0.0);
        for (Eigen::Index j = i + 1; j < n; ++j) {
            a(i, j) = Complex(rng.normal(), rng.normal());
            a(j, i) = std::conj(a(i, j));
        }
    }
    return a;
}

TwoSampleResult compare_orientation_samples(std::string check_name, std::span<const StiefelPoint> first,
                                            std::span<const StiefelPoint> second, RngState& rng,
                                            const CheckOptions& opts) {
    if (first.empty() || second.empty())
        throw Error(ErrorCode::InsufficientSample, "orientation samples must be non-empty");
    const std::size_t m = first.front().m();
    const Eigen::Index md = static_cast<Eigen::Index>(m);
    const std::size_t nf = std::max<std::size_t>(1, opts.n_functionals);
    const double per_level = opts.level / static_cast<double>(nf);

    TwoSampleResult out;
    out.check_name = std::move(check_name);
    out.n1 = first.size();
    out.n2 = second.size();
    out.level = opts.level;
    out.functional_description = "max KS over Re tr(A_j H H') for random Hermitian A_j, Bonferroni level";

    std::vector<double> xs(first.size()), ys(second.size());
    for (std::size_t f = 0; f < nf; ++f) {
        const ComplexMatrix a = random_hermitian(m, rng);
        for (std::size_t i = 0; i < first.size(); ++i) xs[i] = projection_functional(a, first[i].frame());
        for (std::size_t i = 0; i < second.size(); ++i) ys[i] = projection_functional(a, second[i].frame());
        TwoSampleResult ks = ks_two_sample(xs, ys, per_level);
        ks.check_name = "ks_projection_" + std::to_string(f);
        ks.functional_description = "Re tr(A H H'), randomized Hermitian A";
        out.statistic = std::max(out.statistic, ks.statistic);
        out.critical_value = ks.critical_value;
        out.components.push_back(std::move(ks));
    }

    // Mean projection matrices; real and imaginary parts are separate
    // coordinates for the standard error.
    auto accumulate = [&](std::span<const StiefelPoint> s, ComplexMatrix& mean, RealMatrix& var) {
        RealMatrix sum_re = RealMatrix::Zero(md, md), sum_im = RealMatrix::Zero(md, md);
        RealMatrix sq_re = RealMatrix::Zero(md, md), sq_im = RealMatrix::Zero(md, md);
        for (const auto& h : s) {
            const ComplexMatrix p = h.frame() * h.frame().adjoint();
            sum_re += p.real();
            sum_im += p.imag();
            sq_re += p.real().cwiseAbs2();
            sq_im += p.imag().cwiseAbs2();
        }
        const double n = static_cast<double>(s.size());
        const RealMatrix mre = sum_re / n, mim = sum_im / n;
        mean = mre.cast<Complex>() + Complex(0.0, 1.0) * mim.cast<Complex>();
        // Unbiased variance per coordinate, divided by n: squared SE of the mean.
        const RealMatrix vre = ((sq_re / n - mre.cwiseAbs2()) * (n / std::max(1.0, n - 1.0))).cwiseMax(0.0);
        const RealMatrix vim = ((sq_im / n - mim.cwiseAbs2()) * (n / std::max(1.0, n - 1.0))).cwiseMax(0.0);
        var = (vre + vim) / n;
    };
    ComplexMatrix mean1, mean2;
    RealMatrix var1, var2;
    accumulate(first, mean1, var1);
    accumulate(second, mean2, var2);
    const double dist = (mean1 - mean2).norm();
    const double se = std::sqrt((var1 + var2).sum());

    TwoSampleResult mp;
    mp.check_name = "mean_projection";
    mp.functional_description = "Frobenius distance of mean projection matrices vs k * SE";
    mp.statistic = dist;
    mp.critical_value = opts.k * se;
    mp.n1 = first.size();
    mp.n2 = second.size();
    mp.level = opts.level;
    mp.passed = dist <= opts.k * se + kRoundoffFloor;
    mp.details["distance"] = dist;
    mp.details["std_error"] = se;
    out.details["mean_projection_distance"] = dist;
    out.details["mean_projection_se"] = se;
    out.components.push_back(std::move(mp));

    finish_composite(out);
    return out;
}

// ---------------------------------------------------------------------------

VerificationReport normalization_check(const CmacgParams& params, std::size_t n, RngState& rng,
                                       const CheckOptions& opts, const LogDensityFn& log_density) {
    require_samples(n, kMinNormalizationSamples, "normalization_check");
    Lanes lanes(rng);
    RngState draws = lanes(kFirst);
    const ManifoldDims dims = params.dims();
    const CmacgParams uniform = CmacgParams::uniform(dims);

    Moments mom;
    double max_log = -INFINITY, min_log = INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        const StiefelPoint h = sample_cmacg(uniform, draws);
        const double lf = log_density(params, h);
        max_log = std::max(max_log, lf);
        min_log = std::min(min_log, lf);
        mom.add(std::exp(lf));
    }

    VerificationReport rep;
    rep.check_name = "normalization";
    rep.n_samples = n;
    rep.estimate = mom.mean;
    rep.std_error = std::sqrt(mom.variance() / static_cast<double>(n));
    rep.target = 1.0;
    rep.k = opts.k;
    rep.passed = std::abs(rep.estimate - rep.target) <= opts.k * rep.std_error + kRoundoffFloor;
    rep.details["m"] = static_cast<double>(dims.m());
    rep.details["r"] = static_cast<double>(dims.r());
    rep.details["max_log_density"] = max_log;
    rep.details["min_log_density"] = min_log;
    rep.details["z_score"] = rep.std_error > 0.0 ? (rep.estimate - rep.target) / rep.std_error : 0.0;
    return rep;
}

TwoSampleResult unitary_invariance_check(const CmacgParams& params, std::size_t n, RngState& rng,
                                         const CheckOptions& opts) {
    RngState qrng(rng.next_u64());
    const ComplexMatrix q = random_unitary(params.r(), qrng);
    return unitary_invariance_check(params, n, rng, q, opts);
}

TwoSampleResult unitary_invariance_check(const CmacgParams& params, std::size_t n, RngState& rng,
                                         const ComplexMatrix& q, const CheckOptions& opts) {
    require_samples(n, kMinTwoSampleDraws, "unitary_invariance_check");
    const Eigen::Index r = static_cast<Eigen::Index>(params.r());
    if (q.rows() != r || q.cols() != r)
        throw Error(ErrorCode::DimensionMismatch, "Q must be r x r");
    const double qres = semi_unitarity_residual(q);
    if (qres > kStiefelTol) throw Error(ErrorCode::InvalidArgument, "Q is not unitary", qres);

    Lanes lanes(rng);
    RngState frng = lanes(kFunctionals);
    RngState draws = lanes(kFirst);
    const std::size_t m = params.m();
    const std::size_t nf = std::max<std::size_t>(1, opts.n_functionals);

    const ComplexMatrix a_t = random_hermitian(m, frng);
    std::vector<ComplexMatrix> a_s, b_s;
    for (std::size_t f = 0; f < nf; ++f) {
        a_s.push_back(random_hermitian(m, frng));
        b_s.push_back(random_hermitian(params.r(), frng));
    }

    std::vector<double> t1(n), t2(n);
    std::vector<std::vector<double>> s1(nf, std::vector<double>(n)), s2(nf, std::vector<double>(n));
    double t_scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const StiefelPoint h = sample_cmacg(params, draws);
        const ComplexMatrix hq = h.frame() * q;
        t1[i] = projection_functional(a_t, h.frame());
        t2[i] = projection_functional(a_t, hq);
        t_scale = std::max(t_scale, std::abs(t1[i]));
        for (std::size_t f = 0; f < nf; ++f) {
            s1[f][i] = frame_functional(a_s[f], b_s[f], h.frame());
            s2[f][i] = frame_functional(a_s[f], b_s[f], hq);
        }
    }

    TwoSampleResult out;
    out.check_name = "unitary_invariance";
    out.n1 = n;
    out.n2 = n;
    out.level = opts.level;
    out.functional_description = "max KS over Re tr(A_j H B_j H') between H and H Q";

    // t(H) = t(HQ) pointwise, so its subtest is a pointwise identity.
    TwoSampleResult tsub;
    tsub.check_name = "t_projection_identity";
    tsub.functional_description = "max_i |t(H_i) - t(H_i Q)|, t = Re tr(A H H')";
    tsub.n1 = n;
    tsub.n2 = n;
    for (std::size_t i = 0; i < n; ++i) tsub.statistic = std::max(tsub.statistic, std::abs(t1[i] - t2[i]));
    tsub.critical_value = 1e-10 * t_scale;
    tsub.passed = tsub.statistic <= tsub.critical_value;
    out.components.push_back(tsub);

    for (std::size_t f = 0; f < nf; ++f) {
        TwoSampleResult ks = ks_two_sample(s1[f], s2[f], opts.level / static_cast<double>(nf));
        ks.check_name = "ks_frame_" + std::to_string(f);
        ks.functional_description = "Re tr(A H B H'), randomized Hermitian A, B";
        out.statistic = std::max(out.statistic, ks.statistic);
        out.critical_value = ks.critical_value;
        out.components.push_back(std::move(ks));
    }
    out.details["q_identity_residual"] = max_abs(q - ComplexMatrix::Identity(r, r));
    finish_composite(out);
    return out;
}

TwoSampleResult corollary_check(const CmacgParams& params, const ComplexMatrix& b, std::size_t n,
                                RngState& rng, const CheckOptions& opts) {
    require_samples(n, kMinTwoSampleDraws, "corollary_check");
    const CmacgParams target = transform_parameter(params, b);

    Lanes lanes(rng);
    RngState frng = lanes(kFunctionals);
    RngState rng1 = lanes(kFirst);
    RngState rng2 = lanes(kSecond);

    std::vector<StiefelPoint> transformed, direct;
    transformed.reserve(n);
    direct.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        transformed.push_back(orientation_with_retry(
            [&] { return ComplexMatrix(b * sample_complex_matrix_normal(params.normal(), rng1)); }));
    }
    for (std::size_t i = 0; i < n; ++i) direct.push_back(sample_cmacg(target, rng2));

    TwoSampleResult out = compare_orientation_samples("corollary", transformed, direct, frng, opts);
    out.functional_description = "orientation of B Z vs CMACG(B P B'); " + out.functional_description;
    return out;
}

TwoSampleResult general_class_check(const CmacgParams& params, std::size_t n, RngState& rng,
                                    const CheckOptions& opts, const MixtureOptions& mix) {
    require_samples(n, kMinTwoSampleDraws, "general_class_check");
    Lanes lanes(rng);
    RngState frng = lanes(kFunctionals);
    RngState rng1 = lanes(kFirst);
    RngState rng2 = lanes(kSecond);
    RngState wrng = lanes(kAux);

    std::vector<StiefelPoint> mixture, direct;
    mixture.reserve(n);
    direct.reserve(n);
    Moments wmom;
    for (std::size_t i = 0; i < n; ++i) {
        mixture.push_back(orientation_with_retry([&] {
            const double w = mix.degenerate ? 1.0 : wrng.gamma(mix.shape, mix.rate);
            wmom.add(w);
            return ComplexMatrix(sample_complex_matrix_normal(params.normal(), rng1) / std::sqrt(w));
        }));
    }
    for (std::size_t i = 0; i < n; ++i) direct.push_back(sample_cmacg(params, rng2));

    TwoSampleResult out = compare_orientation_samples("general_class", mixture, direct, frng, opts);
    out.functional_description = "orientation of X / sqrt(w) vs CMACG(P); " + out.functional_description;
    out.details["mixture_shape"] = mix.shape;
    out.details["mixture_rate"] = mix.rate;
    out.details["mixture_w_mean"] = wmom.mean;
    return out;
}

VerificationReport normal_covariance_check(const ComplexMatrixNormalParams& params, std::size_t n,
                                           RngState& rng, const CheckOptions& opts,
                                           const NormalSampler& sampler) {
    require_samples(n, kMinCovarianceDraws, "normal_covariance_check");
    Lanes lanes(rng);
    RngState draws = lanes(kFirst);

    const Eigen::Index m = static_cast<Eigen::Index>(params.m());
    const Eigen::Index d = 2 * m;
    const RealMatrix target = stacked_real_covariance(params.column_cov());

    // The mean is known to be zero, so the covariance estimate is the mean
    // of v v' and its SE follows from the spread of the products.
    RealMatrix sum = RealMatrix::Zero(d, d), sum_sq = RealMatrix::Zero(d, d);
    RealVector v(d);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const ComplexMatrix z = sampler(params, draws);
        for (Eigen::Index j = 0; j < z.cols(); ++j) {
            v.head(m) = z.col(j).real();
            v.tail(m) = z.col(j).imag();
            const RealMatrix outer = v * v.transpose();
            sum += outer;
            sum_sq += outer.cwiseAbs2();
            ++count;
        }
    }
    const double nn = static_cast<double>(count);
    const RealMatrix est = sum / nn;
    const RealMatrix var = ((sum_sq / nn - est.cwiseAbs2()) * (nn / (nn - 1.0))).cwiseMax(0.0);

    double worst = 0.0, worst_abs = 0.0;
    Eigen::Index wi = 0, wj = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i; j < d; ++j) {
            const double se = std::sqrt(var(i, j) / nn);
            const double dev = std::abs(est(i, j) - target(i, j));
            const double z = se > 0.0 ? dev / se : (dev > kRoundoffFloor ? INFINITY : 0.0);
            worst_abs = std::max(worst_abs, dev);
            if (z > worst) {
                worst = z;
                wi = i;
                wj = j;
            }
        }
    }

    VerificationReport rep;
    rep.check_name = "normal_covariance";
    rep.n_samples = count;
    rep.estimate = worst;
    rep.std_error = 1.0;
    rep.target = 0.0;
    rep.k = opts.k;
    rep.passed = worst <= opts.k;
    rep.details["max_abs_deviation"] = worst_abs;
    rep.details["worst_row"] = static_cast<double>(wi);
    rep.details["worst_col"] = static_cast<double>(wj);
    rep.details["worst_estimate"] = est(wi, wj);
    rep.details["worst_target"] = target(wi, wj);
    return rep;
}

} // namespace cmacg
