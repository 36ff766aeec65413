#include "ipmdro/error.hpp"

namespace ipmdro {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::AsymmetricMetric: return "AsymmetricMetric";
    case ErrorCode::NonPositiveMetric: return "NonPositiveMetric";
    case ErrorCode::TriangleInequalityViolated: return "TriangleInequalityViolated";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::InvalidEdge: return "InvalidEdge";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::InvalidDistribution: return "InvalidDistribution";
    case ErrorCode::ZeroMassMeasure: return "ZeroMassMeasure";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::NotHomogeneous: return "NotHomogeneous";
    case ErrorCode::UnsupportedVariant: return "UnsupportedVariant";
    case ErrorCode::MissingMetric: return "MissingMetric";
    case ErrorCode::MissingGraph: return "MissingGraph";
    case ErrorCode::NegativeZeta: return "NegativeZeta";
    case ErrorCode::EpsNonPositive: return "EpsNonPositive";
    case ErrorCode::EpsNegative: return "EpsNegative";
    case ErrorCode::NotEven: return "NotEven";
    case ErrorCode::NotAligned: return "NotAligned";
    case ErrorCode::UnknownDivergence: return "UnknownDivergence";
    case ErrorCode::InvalidDivergence: return "InvalidDivergence";
    case ErrorCode::DiscriminatorOutOfDomain: return "DiscriminatorOutOfDomain";
    case ErrorCode::NotConcave: return "NotConcave";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void raise(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace ipmdro
