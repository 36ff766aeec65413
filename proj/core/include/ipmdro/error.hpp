#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ipmdro {

enum class ErrorCode {
  InvalidArgument,
  DimensionMismatch,
  SpaceMismatch,
  NonFiniteValue,
  AsymmetricMetric,
  NonPositiveMetric,
  TriangleInequalityViolated,
  SelfLoop,
  InvalidEdge,
  DisconnectedGraph,
  InvalidDistribution,
  ZeroMassMeasure,
  SingularGram,
  NotHomogeneous,
  UnsupportedVariant,
  MissingMetric,
  MissingGraph,
  NegativeZeta,
  EpsNonPositive,
  EpsNegative,
  NotEven,
  NotAligned,
  UnknownDivergence,
  InvalidDivergence,
  DiscriminatorOutOfDomain,
  NotConcave,
  NumericalBreakdown,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a machine-readable code so the
/// command-line front end can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) raise(code, message);
}

}  // namespace ipmdro
