#include "cmacg/special.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cmacg/error.hpp"

namespace cmacg {

ManifoldDims::ManifoldDims(std::size_t m, std::size_t r) : m_(m), r_(r) {
    if (r < 1 || m < r) {
        std::ostringstream os;
        os << "manifold dimensions need m >= r >= 1, got m=" << m << " r=" << r;
        throw Error(ErrorCode::DimensionMismatch, os.str());
    }
}

double log_cmv_gamma(std::size_t r, double a) {
    if (r < 1) throw Error(ErrorCode::DomainError, "r must be at least 1");
    const double rd = static_cast<double>(r);
    if (!std::isfinite(a) || !(a > rd - 1.0)) {
        std::ostringstream os;
        os << "complex multivariate gamma needs a > r - 1, got a=" << a << " r=" << r;
        throw Error(ErrorCode::DomainError, os.str());
    }
    double s = 0.5 * rd * (rd - 1.0) * std::log(std::numbers::pi);
    for (std::size_t i = 1; i <= r; ++i) s += std::lgamma(a - static_cast<double>(i) + 1.0);
    return s;
}

double log_stiefel_volume(const ManifoldDims& d) {
    const double m = static_cast<double>(d.m());
    const double r = static_cast<double>(d.r());
    return r * std::numbers::ln2 + m * r * std::log(std::numbers::pi) - log_cmv_gamma(d.r(), m);
}

} // namespace cmacg
