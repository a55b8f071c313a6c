#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cmacg::cli {

/// Exit codes of the command-line tool.
enum Exit : int {
    kSuccess = 0,
    kVerificationFailed = 1,
    kInputError = 2,
    kNumericalError = 3,
};

/// Seed used when neither --seed nor CMACG_DEFAULT_SEED is given.
inline constexpr std::uint64_t kDefaultSeed = 0;

/// Names accepted by `verify --checks`, in the order they run.
const std::vector<std::string>& check_names();

struct RunConfig {
    std::string subcommand;
    std::optional<std::size_t> m;
    std::optional<std::size_t> r;
    std::size_t n = 0;
    std::uint64_t seed = kDefaultSeed;
    std::string param_path;
    bool uniform = false;
    bool as_projection = false;
    std::string input_path;
    std::string output_path;
    std::string format;
    std::vector<std::string> checks;
    double level = 0.01;
    double tol = 1e-12;
    int max_iter = 100;
};

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace cmacg::cli
