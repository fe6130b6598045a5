#include "threshlab/error.hpp"

namespace threshlab {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NoCrossing: return "NoCrossing";
        case ErrorKind::MultipleCrossings: return "MultipleCrossings";
        case ErrorKind::NotTransversal: return "NotTransversal";
        case ErrorKind::NegativeDensity: return "NegativeDensity";
        case ErrorKind::NotNormalized: return "NotNormalized";
        case ErrorKind::ZeroMass: return "ZeroMass";
        case ErrorKind::InfiniteEntropy: return "InfiniteEntropy";
        case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
        case ErrorKind::DeltaOutOfRange: return "DeltaOutOfRange";
        case ErrorKind::EpsTooLarge: return "EpsTooLarge";
        case ErrorKind::SupportEscapes: return "SupportEscapes";
        case ErrorKind::EnvelopeViolated: return "EnvelopeViolated";
        case ErrorKind::SampleTooSmall: return "SampleTooSmall";
        case ErrorKind::IntervalEscapes: return "IntervalEscapes";
        case ErrorKind::NotMonotoneLocal: return "NotMonotoneLocal";
        case ErrorKind::InvalidModel: return "InvalidModel";
        case ErrorKind::PremiseFails: return "PremiseFails";
        case ErrorKind::TooLarge: return "TooLarge";
        case ErrorKind::Config: return "Config";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace threshlab
