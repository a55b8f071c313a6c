#pragma once

#include <cstdint>
#include <random>

namespace cmacg {

/// SplitMix64 finalizer; the mixing step of every seed derivation.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of the stream `stream` derived from `master`. Streams for distinct
/// indices are statistically independent for practical purposes, and the rule
/// is fixed so that reports reproduce across runs and builds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

/// Deterministic pseudo-random source. Identical seed and call sequence give
/// an identical stream on the same standard library. Not thread-safe: use one
/// instance per thread (see `split`).
class RngState {
public:
    explicit RngState(std::uint64_t seed = 0) : seed_(seed), engine_(splitmix64(seed)) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }
    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    /// Gamma(shape, rate) variate, mean shape / rate.
    double gamma(double shape, double rate);

    /// Independent generator for stream index `stream`.
    RngState split(std::uint64_t stream) const { return RngState(derive_seed(seed_, stream)); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace cmacg
