#include "cmacg/rng.hpp"

#include "cmacg/error.hpp"

namespace cmacg {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(master) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

double RngState::gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw Error(ErrorCode::InvalidArgument, "gamma shape and rate must be positive");
    std::gamma_distribution<double> g(shape, 1.0 / rate);
    return g(engine_);
}

} // namespace cmacg
