#pragma once

#include <optional>

#include "ipmdro/function_class.hpp"
#include "ipmdro/space.hpp"
#include "ipmdro/tolerances.hpp"

namespace ipmdro {

/// Largest point count accepted by the dense coupling LP on a general metric.
inline constexpr Eigen::Index kMaxTransportPoints = 60;

struct IpmValue {
  /// sup_f <f, q - p>; may be negative for a non-even explicit set and
  /// +infinity when mass has to cross between blocks of a quadratic class.
  double value = 0.0;
  /// A maximizing function (or a member of the class attaining the value).
  std::optional<Vector> witness;
  /// Optimal coupling for the Lipschitz ball; rows follow q, columns follow p.
  std::optional<Matrix> transport_plan;
};

/// One-sided integral probability metric d_F(Q, P) = sup_{f in F} E_Q f - E_P f.
IpmValue ipm_distance(const FunctionClass& cls, const DiscreteDistribution& q,
                      const DiscreteDistribution& p, const Tolerances& tol = default_tolerances());

/// Optimal transport cost between q and p for the ground metric of the
/// space. Uses the cumulative-mass formula on line metrics and the coupling
/// LP otherwise (at most kMaxTransportPoints points).
IpmValue wasserstein1(const SampleSpace& space, const Vector& q, const Vector& p,
                      const Tolerances& tol = default_tolerances());

}  // namespace ipmdro
