#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "ipmdro/lp.hpp"
#include "ipmdro/tolerances.hpp"

namespace ipmdro {

using lp::LpBuilder;
using lp::LpProblem;
using lp::LpSolution;
using lp::LpStatus;
using lp::solve_lp;

/// Euclidean projection onto {q >= 0, sum q = 1}.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v);

/// Euclidean projection onto {q >= 0, sum q = mass}.
Eigen::VectorXd project_scaled_simplex(const Eigen::VectorXd& v, double mass);

/// Largest eigenvalue of a symmetric positive-semidefinite matrix by power
/// iteration.
double power_iteration(const Eigen::MatrixXd& psd, int iterations);

struct QuadraticMaximum {
  double value = 0.0;
  Eigen::VectorXd argmax;
  /// Frank-Wolfe gap at `argmax`: an upper bound on (optimum - value).
  double gap_bound = 0.0;
  long iterations = 0;
  bool converged = false;
};

/// A partition of the coordinates with a fixed mass per block. The feasible
/// set is the product of the scaled simplices {q_b >= 0, sum q_b = mass_b}.
struct SimplexBlocks {
  std::vector<std::vector<Eigen::Index>> indices;
  std::vector<double> masses;

  static SimplexBlocks single(Eigen::Index n, double mass = 1.0);
};

/// maximize q' Q q + c' q over the probability simplex, Q negative
/// semidefinite. Accelerated projected gradient with backtracking and an
/// active-face Newton polish; stops once the Frank-Wolfe gap is <= tol.
/// Throws NotConcave when Q has an eigenvalue above `tol.concavity`.
QuadraticMaximum maximize_concave_quadratic_over_simplex(const Eigen::MatrixXd& q_mat,
                                                         const Eigen::VectorXd& c, double tol,
                                                         const Tolerances& tols = default_tolerances());

/// Same objective over a product of scaled simplices.
QuadraticMaximum maximize_concave_quadratic(const Eigen::MatrixXd& q_mat, const Eigen::VectorXd& c,
                                            const SimplexBlocks& blocks, double tol,
                                            const Tolerances& tols = default_tolerances());

struct ScalarMinimum {
  double argmin = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section search for a convex function on [lo, hi]; stops when the
/// bracket is narrower than `tol` or after `max_iterations` shrink steps.
ScalarMinimum minimize_scalar_convex(const std::function<double(double)>& f, double lo, double hi,
                                     double tol, int max_iterations = 400);

}  // namespace ipmdro
