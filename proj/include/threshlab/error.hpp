#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace threshlab {

enum class ErrorKind {
    NoCrossing,
    MultipleCrossings,
    NotTransversal,
    NegativeDensity,
    NotNormalized,
    ZeroMass,
    InfiniteEntropy,
    QuadratureNotConverged,
    DeltaOutOfRange,
    EpsTooLarge,
    SupportEscapes,
    EnvelopeViolated,
    SampleTooSmall,
    IntervalEscapes,
    NotMonotoneLocal,
    InvalidModel,
    PremiseFails,
    TooLarge,
    Config,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a kind so callers (and tests)
/// can dispatch on it without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace threshlab
