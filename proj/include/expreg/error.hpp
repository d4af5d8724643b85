#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace expreg {

enum class ErrorCode {
    InvalidSpec,
    EmptyWindow,
    NotNested,
    DimMismatch,
    NonConvergence,
    TooLarge,
    SingularOperator,
    SubstepLimit,
    NonFiniteBreakdown,
    InvalidGeometry,
    CutoffAboveNyquist,
    IllConditionedMoments,
    InsufficientRange,
    DegenerateFit,
    ConfigError,
    IoError,
};

const char* to_string(ErrorCode code) noexcept;

/// True for failures of the numerics (as opposed to bad input).
bool is_numeric_failure(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Raised when an iterative solve hits its iteration cap.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(double residual, std::int64_t iterations);
    double residual() const noexcept { return residual_; }
    std::int64_t iterations() const noexcept { return iterations_; }

private:
    double residual_;
    std::int64_t iterations_;
};

} // namespace expreg
