#pragma once

#include <stdexcept>
#include <string>

namespace pgd {

enum class ErrorCode {
    non_increasing_breakpoints,
    negative_density,
    non_positive_boundary_velocity,
    negative_argument,
    undefined_at_rarefaction_center,
    exceptional_point,
    path_lost,
    quadrature_not_converged,
    non_compact_scenario,
    event_queue_overflow,
    schema_error,
    io_error,
    usage,
};

// Process exit status for a failure of this kind: 1 usage, 2 data, 3 numeric.
inline int exit_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::usage:
            return 1;
        case ErrorCode::non_increasing_breakpoints:
        case ErrorCode::negative_density:
        case ErrorCode::non_positive_boundary_velocity:
        case ErrorCode::schema_error:
        case ErrorCode::io_error:
        case ErrorCode::non_compact_scenario:
            return 2;
        default:
            return 3;
    }
}

inline const char* code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::non_increasing_breakpoints: return "NonIncreasingBreakpoints";
        case ErrorCode::negative_density: return "NegativeDensity";
        case ErrorCode::non_positive_boundary_velocity: return "NonPositiveBoundaryVelocity";
        case ErrorCode::negative_argument: return "NegativeArgument";
        case ErrorCode::undefined_at_rarefaction_center: return "UndefinedAtRarefactionCenter";
        case ErrorCode::exceptional_point: return "ExceptionalPoint";
        case ErrorCode::path_lost: return "PathLost";
        case ErrorCode::quadrature_not_converged: return "QuadratureNotConverged";
        case ErrorCode::non_compact_scenario: return "NonCompactScenario";
        case ErrorCode::event_queue_overflow: return "EventQueueOverflow";
        case ErrorCode::schema_error: return "SchemaError";
        case ErrorCode::io_error: return "IoError";
        case ErrorCode::usage: return "Usage";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(code_name(code)) + ": " + detail), code_(code), detail_(detail) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace pgd
