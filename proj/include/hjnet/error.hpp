#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hjnet {

enum class Errc {
    invalid_argument,
    path_invalid,
    concat_mismatch,
    enumeration_cap_exceeded,
    graph_invalid,
    schema_error,
    not_coercive,
    quasiconvexity_required,
    convexity_required,
    level_below_min,
    h4_violated,
    no_convergence,
    fork_condition_violated,
    bracket_failure,
    empty_aubry,
    trace_incompatible,
};

constexpr std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_argument: return "InvalidArgument";
        case Errc::path_invalid: return "PathInvalid";
        case Errc::concat_mismatch: return "ConcatMismatch";
        case Errc::enumeration_cap_exceeded: return "EnumerationCapExceeded";
        case Errc::graph_invalid: return "GraphInvalid";
        case Errc::schema_error: return "SchemaError";
        case Errc::not_coercive: return "NotCoercive";
        case Errc::quasiconvexity_required: return "QuasiconvexityRequired";
        case Errc::convexity_required: return "ConvexityRequired";
        case Errc::level_below_min: return "LevelBelowMin";
        case Errc::h4_violated: return "H4Violated";
        case Errc::no_convergence: return "NoConvergence";
        case Errc::fork_condition_violated: return "ForkConditionViolated";
        case Errc::bracket_failure: return "BracketFailure";
        case Errc::empty_aubry: return "EmptyAubry";
        case Errc::trace_incompatible: return "TraceIncompatible";
    }
    return "Unknown";
}

/// Failures that are numerical (as opposed to bad input).
constexpr bool is_numerical(Errc code) noexcept {
    return code == Errc::no_convergence || code == Errc::bracket_failure ||
           code == Errc::empty_aubry || code == Errc::not_coercive;
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace hjnet
