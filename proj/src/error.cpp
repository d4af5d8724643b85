#include "expreg/error.hpp"

#include <sstream>

namespace expreg {

const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::NotNested: return "NotNested";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::SingularOperator: return "SingularOperator";
    case ErrorCode::SubstepLimit: return "SubstepLimit";
    case ErrorCode::NonFiniteBreakdown: return "NonFiniteBreakdown";
    case ErrorCode::InvalidGeometry: return "InvalidGeometry";
    case ErrorCode::CutoffAboveNyquist: return "CutoffAboveNyquist";
    case ErrorCode::IllConditionedMoments: return "IllConditionedMoments";
    case ErrorCode::InsufficientRange: return "InsufficientRange";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

bool is_numeric_failure(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::NonConvergence:
    case ErrorCode::SingularOperator:
    case ErrorCode::SubstepLimit:
    case ErrorCode::NonFiniteBreakdown:
    case ErrorCode::IllConditionedMoments:
    case ErrorCode::InsufficientRange:
    case ErrorCode::DegenerateFit:
        return true;
    default:
        return false;
    }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
{
}

namespace {
std::string non_convergence_message(double residual, std::int64_t iterations)
{
    std::ostringstream os;
    os << "relative residual " << residual << " after " << iterations << " iterations";
    return os.str();
}
} // namespace

NonConvergenceError::NonConvergenceError(double residual, std::int64_t iterations)
    : Error(ErrorCode::NonConvergence, non_convergence_message(residual, iterations)),
      residual_(residual), iterations_(iterations)
{
}

} // namespace expreg
