#include "ipmdro/critic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ipmdro/dro.hpp"
#include "ipmdro/error.hpp"
#include "ipmdro/ipm.hpp"
#include "ipmdro/penalties.hpp"

namespace ipmdro {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double alignment_tolerance(const FunctionClass& cls, const Tolerances& tol) {
  return cls.is_quadratic() ? tol.alignment_iterative : tol.alignment_exact;
}

}  // namespace

double critic_loss(const DiscreteDistribution& p, const DiscreteDistribution& mu, double eps,
                   const FunctionClass& cls, const FunctionVec& h, const Tolerances& tol) {
  require(eps > 0.0, ErrorCode::EpsNonPositive, "critic_loss needs eps > 0");
  require_same_space(p.space(), mu.space(), "critic_loss");
  require_same_space(p.space(), h.space(), "critic_loss");
  const double linear = (p.weights() - mu.weights()).dot(h.values());
  const double gauge = theta(cls, h, tol).value;
  if (std::isinf(gauge)) return kInf;
  return linear + eps * gauge;
}

CriticInfimum critic_infimum(const DiscreteDistribution& p, const DiscreteDistribution& mu, double eps,
                             const FunctionClass& cls, const Tolerances& tol) {
  require(eps > 0.0, ErrorCode::EpsNonPositive, "critic_infimum needs eps > 0");
  const IpmValue d = ipm_distance(cls, mu, p, tol);
  CriticInfimum out;
  out.distance = d.value;
  if (d.value <= eps) return out;
  out.bounded = false;
  out.value = -kInf;
  out.ray = d.witness;
  return out;
}

AlignmentReport check_alignment(const DiscreteDistribution& p, const FunctionClass& cls, double eps,
                                const FunctionVec& h, const Tolerances& tol) {
  require(eps > 0.0, ErrorCode::EpsNonPositive, "check_alignment needs eps > 0");
  const PenaltyValue lambda = lambda_penalty(p, cls, eps, h, tol);
  const PenaltyValue gauge = theta(cls, h, tol);
  AlignmentReport out;
  out.lambda_value = lambda.value;
  out.eps_theta = eps * gauge.value;
  out.gap = std::max(0.0, out.eps_theta - out.lambda_value);
  out.exact = lambda.exact;
  if (std::isinf(gauge.value)) return out;
  out.aligned = std::abs(out.eps_theta - out.lambda_value) <= alignment_tolerance(cls, tol);
  if (!out.aligned) return out;
  const DroResult worst = worst_case_expectation(p, cls, eps, h, tol);
  const IpmValue d = ipm_distance(cls, worst.worst_q, p, tol);
  out.witness_ball_violation = std::max(0.0, d.value - eps);
  out.witness_residual =
      std::abs((worst.worst_q.weights() - p.weights()).dot(h.values()) - out.eps_theta);
  out.witness_mu = worst.worst_q;
  return out;
}

double witness_lp_value(const DiscreteDistribution& p, const FunctionClass& cls, double eps,
                        const FunctionVec& h, const Tolerances& tol) {
  return worst_case_expectation(p, cls, eps, h, tol).value - expectation(p, h);
}

AlignedInstance make_aligned_instance(const FunctionClass& cls, const DiscreteDistribution& p, Rng& rng,
                                      const Tolerances& tol) {
  const SpacePtr& space = p.space();
  for (int attempt = 0; attempt < 100; ++attempt) {
    const DiscreteDistribution mu = DiscreteDistribution::normalized(space, rng.simplex_point(space->dim()));
    const IpmValue d = ipm_distance(cls, mu, p, tol);
    if (!(d.value > 1e-6) || !std::isfinite(d.value) || !d.witness) continue;
    const double scale = rng.uniform(0.5, 2.0);
    return AlignedInstance{p, mu, d.value, FunctionVec(space, scale * *d.witness)};
  }
  raise(ErrorCode::NumericalBreakdown, "could not draw a distribution at positive distance from P");
}

TwoSidedReport two_sided_check(const DiscreteDistribution& p_minus, const DiscreteDistribution& p_plus,
                               const FunctionClass& cls, double eps, const FunctionVec& h_star,
                               const Tolerances& tol) {
  require(eps > 0.0, ErrorCode::EpsNonPositive, "two_sided_check needs eps > 0");
  require(cls.is_even(), ErrorCode::NotEven, "two_sided_check needs a class closed under negation");
  require_same_space(p_minus.space(), p_plus.space(), "two_sided_check");
  const double gauge = theta(cls, h_star, tol).value;
  require(std::isfinite(gauge), ErrorCode::NotAligned, "h_star has infinite gauge");
  const double align_tol = alignment_tolerance(cls, tol);
  const double distance = ipm_distance(cls, p_plus, p_minus, tol).value;
  require(distance <= eps + tol.ball_feasibility, ErrorCode::NotAligned,
          "P_plus lies outside the ball around P_minus");
  const double shift = (p_plus.weights() - p_minus.weights()).dot(h_star.values());
  require(std::abs(shift - eps * gauge) <= align_tol, ErrorCode::NotAligned,
          "h_star does not attain eps * Theta between P_minus and P_plus");

  TwoSidedReport out;
  out.theta = gauge;
  out.sup_value = worst_case_expectation(p_minus, cls, eps, h_star, tol).value;
  out.sup_expected = expectation(p_minus, h_star) + eps * gauge;
  out.sup_residual = std::abs(out.sup_value - out.sup_expected);
  out.inf_value = -worst_case_expectation(p_plus, cls, eps, -h_star, tol).value;
  out.inf_expected = expectation(p_plus, h_star) - eps * gauge;
  out.inf_residual = std::abs(out.inf_value - out.inf_expected);
  return out;
}

}  // namespace ipmdro
