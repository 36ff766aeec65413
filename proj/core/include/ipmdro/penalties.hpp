#pragma once

#include <optional>

#include "ipmdro/function_class.hpp"
#include "ipmdro/space.hpp"
#include "ipmdro/tolerances.hpp"

namespace ipmdro {

/// A split h = h1 + h2 attaining (or bounding) an infimal convolution.
struct Decomposition {
  Vector h1;
  Vector h2;
};

struct PenaltyValue {
  /// Nonnegative; +infinity when h lies outside the cone generated by F.
  double value = 0.0;
  /// Certified lower bound; equals `value` on exact paths.
  double lower_bound = 0.0;
  /// True when `value` comes from a closed form or an exact LP.
  bool exact = true;
  /// Set when only an upper bound is known (non-convex zeta).
  bool upper_bound_only = false;
  bool converged = true;
  /// Convex-combination weights of a gauge over the members of an explicit set.
  std::optional<Vector> weights;
  /// Split attaining the value of the penalty Lambda.
  std::optional<Decomposition> decomposition;
  /// Maximizing point of J_P.
  std::optional<Eigen::Index> argmax;

  [[nodiscard]] double gap() const noexcept { return value - lower_bound; }
};

/// inf { sum w : sum_i w_i f_i = h, w >= 0 } over the members of an explicit set.
PenaltyValue gauge_explicit(const FunctionClass& cls, const FunctionVec& h,
                            const Tolerances& tol = default_tolerances());

/// Closed-form gauge of a structured ball.
PenaltyValue theta_closed_form(const FunctionClass& cls, const FunctionVec& h);

/// zeta(h)^(1/k); flagged as an upper bound when zeta is not convex.
PenaltyValue gauge_from_zeta(const FunctionClass& cls, const FunctionVec& h);

/// Dispatches to the gauge routine that matches the class variant.
PenaltyValue theta(const FunctionClass& cls, const FunctionVec& h,
                   const Tolerances& tol = default_tolerances());

/// max_i h_i - E_P[h].
PenaltyValue j_penalty(const DiscreteDistribution& p, const FunctionVec& h);

struct CenteredPenalty {
  double b_star = 0.0;
  PenaltyValue penalty;
};

/// inf_b Theta(h - b) together with a minimizing offset.
CenteredPenalty centered_theta(const FunctionClass& cls, const FunctionVec& h,
                               const Tolerances& tol = default_tolerances());

/// inf_{h1 + h2 = h} J_P(h1) + eps Theta(h2). Exact LP for the explicit and
/// polyhedral balls; a cutting-plane sandwich for the quadratic balls, where
/// `value` is attained by the returned decomposition and `lower_bound` is
/// the cutting-plane model value. Throws EpsNonPositive for eps <= 0.
PenaltyValue lambda_penalty(const DiscreteDistribution& p, const FunctionClass& cls, double eps,
                            const FunctionVec& h, const Tolerances& tol = default_tolerances());

}  // namespace ipmdro
