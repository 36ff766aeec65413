#pragma once

#include <limits>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ipmdro/tolerances.hpp"

namespace ipmdro::lp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct VariableBound {
  double lower = 0.0;
  double upper = kInfinity;
};

/// maximize   objective' x
/// subject to eq_matrix x  = eq_rhs
///            ub_matrix x <= ub_rhs
///            lower <= x <= upper
/// An empty `bounds` vector means x >= 0.
struct LpProblem {
  Vector objective;
  Matrix eq_matrix;
  Vector eq_rhs;
  Matrix ub_matrix;
  Vector ub_rhs;
  std::vector<VariableBound> bounds;

  [[nodiscard]] Eigen::Index num_variables() const noexcept { return objective.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string_view to_string(LpStatus status) noexcept;

/// Duals follow the Lagrangian L = c'x - y_eq'(A_eq x - b_eq) - y_ub'(A_ub x - b_ub),
/// so `ub_duals` are nonnegative at an optimum.
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  Vector primal;
  double objective = 0.0;
  Vector eq_duals;
  Vector ub_duals;
  long iterations = 0;
};

/// Primal/dual residuals of a claimed optimum, evaluated in the original
/// (unconverted) problem.
struct LpCertificate {
  double primal_residual = 0.0;     // max violation of rows and bounds
  double dual_infeasibility = 0.0;  // max sign violation of multipliers
  double complementarity = 0.0;     // max |multiplier * slack|
  double dual_objective = 0.0;
  double duality_gap = 0.0;         // dual_objective - objective

  [[nodiscard]] bool holds(const LpProblem& problem, const LpSolution& solution,
                           const Tolerances& tol = default_tolerances()) const;
};

/// Two-phase revised simplex on a dense basis inverse with Bland's rule.
/// Deterministic for identical input. Throws DimensionMismatch for
/// inconsistent shapes and NumericalBreakdown when the basis becomes singular
/// or a claimed optimum fails its certificate.
LpSolution solve_lp(const LpProblem& problem, const Tolerances& tol = default_tolerances());

LpCertificate certify(const LpProblem& problem, const LpSolution& solution);

/// Row-by-row construction of an LpProblem from sparse terms.
class LpBuilder {
 public:
  using Terms = std::vector<std::pair<Eigen::Index, double>>;

  Eigen::Index add_variable(double lower = 0.0, double upper = kInfinity, double cost = 0.0);
  void set_cost(Eigen::Index var, double cost) { costs_[static_cast<std::size_t>(var)] = cost; }
  Eigen::Index add_eq(Terms terms, double rhs);
  Eigen::Index add_le(Terms terms, double rhs);
  /// Stored as the negated <= row.
  Eigen::Index add_ge(Terms terms, double rhs);

  [[nodiscard]] Eigen::Index num_variables() const noexcept { return static_cast<Eigen::Index>(costs_.size()); }
  [[nodiscard]] LpProblem build() const;

 private:
  std::vector<double> costs_;
  std::vector<VariableBound> bounds_;
  std::vector<std::pair<Terms, double>> eq_rows_;
  std::vector<std::pair<Terms, double>> ub_rows_;
};

}  // namespace ipmdro::lp
