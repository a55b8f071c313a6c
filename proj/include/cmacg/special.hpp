#pragma once

// Complex multivariate gamma function and complex Stiefel manifold volume,
// both in log-space (the raw values overflow already for moderate m).

#include <cstddef>

namespace cmacg {

/// Dimensions (m, r) of the complex Stiefel manifold of m x r semi-unitary
/// frames. Construction enforces m >= r >= 1.
class ManifoldDims {
public:
    ManifoldDims(std::size_t m, std::size_t r);

    std::size_t m() const noexcept { return m_; }
    std::size_t r() const noexcept { return r_; }

    friend bool operator==(const ManifoldDims&, const ManifoldDims&) = default;

private:
    std::size_t m_;
    std::size_t r_;
};

/// log Gamma_r^C[a] = (r(r-1)/2) log pi + sum_{i=1}^r log Gamma(a - i + 1).
/// Requires a > r - 1; throws DomainError otherwise.
double log_cmv_gamma(std::size_t r, double a);

/// log Vol(V_{r,m}^C) = r log 2 + m r log pi - log Gamma_r^C[m].
double log_stiefel_volume(const ManifoldDims& d);

} // namespace cmacg
