#pragma once

#include <stdexcept>
#include <string>

namespace mcf {

enum class ErrorCode {
    NonManifold,
    DegenerateFace,
    InconsistentOrientation,
    NumericalDegeneracy,
    NonFiniteInput,
    SupNormViolation,
    NonPositiveScale,
    MeshDegenerated,
    InsufficientTail,
    TimeAfterCenter,
    WindowOutOfRange,
    NegativeSample,
    NoSnapshotNearTarget,
    WindowNotCovered,
    NonNegativeTime,
    EmptySlice,
    InnerBallEmpty,
    PreconditionUnverified,
    ConfigInvalid,
    MissingArtifacts,
};

const char* to_string(ErrorCode c);

/// Single exception type for all domain errors; tests dispatch on code().
class FlowError : public std::runtime_error {
public:
    FlowError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw FlowError(code, what);
}

} // namespace mcf
