#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cmacg {

enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    NotHermitian,
    NotPositiveDefinite,
    NotOnManifold,
    NonConvergence,
    IllConditioned,
    RankDeficient,
    SingularTransform,
    CholeskyFailure,
    DomainError,
    InsufficientSample,
    ParseError,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; the code distinguishes failure modes
/// and `residual()` carries the offending numerical quantity when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what, std::optional<double> residual = std::nullopt)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code),
          residual_(residual) {}

    ErrorCode code() const noexcept { return code_; }
    std::optional<double> residual() const noexcept { return residual_; }

    /// True for failures of numerical origin (as opposed to malformed input).
    bool is_numerical() const noexcept {
        switch (code_) {
        case ErrorCode::NonConvergence:
        case ErrorCode::IllConditioned:
        case ErrorCode::RankDeficient:
        case ErrorCode::SingularTransform:
        case ErrorCode::CholeskyFailure:
            return true;
        default:
            return false;
        }
    }

private:
    ErrorCode code_;
    std::optional<double> residual_;
};

} // namespace cmacg
