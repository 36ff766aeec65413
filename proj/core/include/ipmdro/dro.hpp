#pragma once

#include <cstdint>

#include "ipmdro/function_class.hpp"
#include "ipmdro/space.hpp"
#include "ipmdro/tolerances.hpp"

namespace ipmdro {

enum class DroMethod {
  ExactLp,           // one LP with the ball encoded linearly
  ColumnGeneration,  // Dudley ball: LP over a growing set of boundary functions
  DualBisection,     // quadratic balls: search over the multiplier of the distance constraint
};

std::string_view to_string(DroMethod method) noexcept;

struct DroResult {
  /// E_{worst_q}[h]; worst_q is feasible, so this is a certified lower bound.
  double value = 0.0;
  DiscreteDistribution worst_q;
  DroMethod method = DroMethod::ExactLp;
  /// Certified upper bound minus `value`; zero on the exact path.
  double gap_estimate = 0.0;

  [[nodiscard]] bool exact() const noexcept { return method == DroMethod::ExactLp; }
};

/// sup { E_Q[h] : d_F(Q, P) <= eps }. Throws EpsNegative for eps < 0.
DroResult worst_case_expectation(const DiscreteDistribution& p, const FunctionClass& cls, double eps,
                                 const FunctionVec& h, const Tolerances& tol = default_tolerances());

struct IdentityReport {
  double lhs = 0.0;
  double e_p_h = 0.0;
  double lambda_value = 0.0;
  double residual = 0.0;
  /// Sandwich widths of the two sides (zero on exact paths).
  double lhs_gap = 0.0;
  double lambda_gap = 0.0;
  bool exact = false;
};

/// Computes both sides of sup_B E_Q h = E_P h + Lambda(h) independently.
IdentityReport verify_identity(const DiscreteDistribution& p, const FunctionClass& cls, double eps,
                               const FunctionVec& h, const Tolerances& tol = default_tolerances());

struct BoundReport {
  double lhs = 0.0;
  double e_p_h = 0.0;
  double b_star = 0.0;
  double centered_theta = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  /// |slack| within the ball-feasibility tolerance.
  bool equality = false;
};

/// Compares the worst case with E_P[h] + eps inf_b Theta(h - b).
BoundReport corollary_bound(const DiscreteDistribution& p, const FunctionClass& cls, double eps,
                            const FunctionVec& h, const Tolerances& tol = default_tolerances());

struct TightnessReport {
  std::size_t samples = 0;
  /// max of Lambda(h) - min(J_P(h), eps Theta(h)), clipped at zero.
  double max_bound_violation = 0.0;
  /// max of Lambda(h + h') - Lambda(h) - Lambda(h'), clipped at zero.
  double max_subadditivity_violation = 0.0;
};

/// Random-pair check of Lambda <= min(J_P, eps Theta) and subadditivity.
TightnessReport tightness_report(const DiscreteDistribution& p, const FunctionClass& cls, double eps,
                                 std::size_t samples, std::uint64_t seed,
                                 const Tolerances& tol = default_tolerances());

}  // namespace ipmdro
