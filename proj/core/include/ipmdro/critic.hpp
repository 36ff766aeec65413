#pragma once

#include <optional>

#include "ipmdro/function_class.hpp"
#include "ipmdro/random.hpp"
#include "ipmdro/space.hpp"
#include "ipmdro/tolerances.hpp"

namespace ipmdro {

/// E_P[h] - E_mu[h] + eps Theta(h). +infinity when Theta(h) is.
double critic_loss(const DiscreteDistribution& p, const DiscreteDistribution& mu, double eps,
                   const FunctionClass& cls, const FunctionVec& h,
                   const Tolerances& tol = default_tolerances());

struct CriticInfimum {
  /// False when the loss is unbounded below.
  bool bounded = true;
  /// 0 when bounded, -infinity otherwise.
  double value = 0.0;
  /// One-sided distance d_F(mu, P) deciding the regime.
  double distance = 0.0;
  /// Direction along which the loss decreases linearly (unbounded regime).
  std::optional<Vector> ray;
};

/// inf_h critic_loss: zero while d_F(mu, P) <= eps, otherwise unbounded along
/// the maximizing member of F.
CriticInfimum critic_infimum(const DiscreteDistribution& p, const DiscreteDistribution& mu, double eps,
                             const FunctionClass& cls, const Tolerances& tol = default_tolerances());

struct AlignmentReport {
  double lambda_value = 0.0;
  double eps_theta = 0.0;
  /// eps Theta(h) - Lambda(h) >= 0.
  double gap = 0.0;
  bool aligned = false;
  bool exact = true;
  std::optional<DiscreteDistribution> witness_mu;
  /// max(0, d_F(mu, P) - eps) for the witness.
  double witness_ball_violation = 0.0;
  /// |<mu - P, h> - eps Theta(h)| for the witness.
  double witness_residual = 0.0;
};

/// Decides whether Lambda(h) = eps Theta(h) and, if so, extracts and verifies a
/// witness distribution from the worst case.
AlignmentReport check_alignment(const DiscreteDistribution& p, const FunctionClass& cls, double eps,
                                const FunctionVec& h, const Tolerances& tol = default_tolerances());

/// max { <mu - P, h> : mu a distribution, <f, mu - P> <= eps for all f in F }.
/// A witness exists exactly when this reaches eps Theta(h).
double witness_lp_value(const DiscreteDistribution& p, const FunctionClass& cls, double eps,
                        const FunctionVec& h, const Tolerances& tol = default_tolerances());

struct AlignedInstance {
  DiscreteDistribution p;
  DiscreteDistribution mu;
  double eps = 0.0;
  FunctionVec h;
};

/// Random instance aligned by construction: mu is drawn at random, eps is set
/// to d_F(mu, P) and h is a positive multiple of the member attaining it.
AlignedInstance make_aligned_instance(const FunctionClass& cls, const DiscreteDistribution& p, Rng& rng,
                                      const Tolerances& tol = default_tolerances());

struct TwoSidedReport {
  double theta = 0.0;
  /// sup over the ball around P_minus and its predicted value.
  double sup_value = 0.0;
  double sup_expected = 0.0;
  double sup_residual = 0.0;
  /// inf over the ball around P_plus and its predicted value.
  double inf_value = 0.0;
  double inf_expected = 0.0;
  double inf_residual = 0.0;
};

/// Checks both worst-case displays for an aligned h_star. Throws NotEven for
/// a class that is not closed under negation and NotAligned when P_plus is
/// not a witness for (P_minus, h_star).
TwoSidedReport two_sided_check(const DiscreteDistribution& p_minus, const DiscreteDistribution& p_plus,
                               const FunctionClass& cls, double eps, const FunctionVec& h_star,
                               const Tolerances& tol = default_tolerances());

}  // namespace ipmdro
