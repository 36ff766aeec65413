#include "ipmdro/dro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ipmdro/error.hpp"
#include "ipmdro/ipm.hpp"
#include "ipmdro/penalties.hpp"
#include "ipmdro/random.hpp"
#include "ipmdro/solvers.hpp"

namespace ipmdro {
namespace {

using Index = Eigen::Index;
constexpr double kInf = std::numeric_limits<double>::infinity();

DroResult make_result(const DiscreteDistribution& p, const Vector& q, const Vector& h, DroMethod method,
                      double upper_bound) {
  DiscreteDistribution worst = DiscreteDistribution::normalized(p.space(), q);
  const double value = worst.weights().dot(h);
  return DroResult{value, std::move(worst), method, std::max(0.0, upper_bound - value)};
}

// q >= 0, sum q = 1 with the ball rows supplied by the caller; returns the
// first n variables as q.
struct SimplexLp {
  LpBuilder builder;
  std::vector<Index> q;

  explicit SimplexLp(const Vector& h) {
    LpBuilder::Terms mass;
    for (Index i = 0; i < h.size(); ++i) {
      q.push_back(builder.add_variable(0.0, kInf, h(i)));
      mass.emplace_back(q.back(), 1.0);
    }
    builder.add_eq(std::move(mass), 1.0);
  }

  void add_member(const Vector& f, double rhs) {
    LpBuilder::Terms row;
    for (Index i = 0; i < f.size(); ++i) {
      if (f(i) != 0.0) row.emplace_back(q[static_cast<std::size_t>(i)], f(i));
    }
    builder.add_le(std::move(row), rhs);
  }
};

LpSolution solve_or_throw(const LpProblem& problem, const Tolerances& tol) {
  const LpSolution sol = solve_lp(problem, tol);
  // P itself is always feasible and the objective is bounded on the simplex.
  require(sol.status == LpStatus::Optimal, ErrorCode::NumericalBreakdown,
          "worst-case LP did not reach an optimum although P is feasible");
  return sol;
}

DroResult explicit_lp(const DiscreteDistribution& p, const FunctionClass& cls, double eps, const Vector& h,
                      const Tolerances& tol) {
  const Matrix& f = cls.members();
  SimplexLp lp(h);
  for (Index k = 0; k < f.cols(); ++k) lp.add_member(f.col(k), eps + f.col(k).dot(p.weights()));
  const LpSolution sol = solve_or_throw(lp.builder.build(), tol);
  return make_result(p, sol.primal.head(h.size()), h, DroMethod::ExactLp, sol.objective);
}

DroResult sup_norm_lp(const DiscreteDistribution& p, double eps, const Vector& h, const Tolerances& tol) {
  // q - a + b = p with sum(a + b) <= eps: a is the added mass, b the removed.
  const Index n = h.size();
  SimplexLp lp(h);
  std::vector<Index> a;
  std::vector<Index> b;
  LpBuilder::Terms budget;
  for (Index i = 0; i < n; ++i) {
    a.push_back(lp.builder.add_variable());
    b.push_back(lp.builder.add_variable());
    budget.emplace_back(a.back(), 1.0);
    budget.emplace_back(b.back(), 1.0);
  }
  for (Index i = 0; i < n; ++i) {
    lp.builder.add_eq({{lp.q[static_cast<std::size_t>(i)], 1.0},
                       {a[static_cast<std::size_t>(i)], -1.0},
                       {b[static_cast<std::size_t>(i)], 1.0}},
                      p[i]);
  }
  lp.builder.add_le(std::move(budget), eps);
  const LpSolution sol = solve_or_throw(lp.builder.build(), tol);
  return make_result(p, sol.primal.head(n), h, DroMethod::ExactLp, sol.objective);
}

DroResult lipschitz_lp(const DiscreteDistribution& p, const FunctionClass& cls, double eps, const Vector& h,
                       const Tolerances& tol) {
  const SampleSpace& space = *cls.space();
  const Matrix& c = space.metric();
  const Index n = h.size();
  if (space.is_line_metric()) {
    // Mass moves along the line through flows on neighbouring edges.
    SimplexLp lp(h);
    const auto& order = space.line_order();
    std::vector<LpBuilder::Terms> balance(static_cast<std::size_t>(n));
    LpBuilder::Terms budget;
    for (std::size_t k = 0; k + 1 < order.size(); ++k) {
      const auto from = static_cast<Index>(order[k]);
      const auto to = static_cast<Index>(order[k + 1]);
      const double gap = c(from, to);
      const Index right = lp.builder.add_variable();
      const Index left = lp.builder.add_variable();
      balance[order[k]].emplace_back(right, 1.0);
      balance[order[k]].emplace_back(left, -1.0);
      balance[order[k + 1]].emplace_back(right, -1.0);
      balance[order[k + 1]].emplace_back(left, 1.0);
      budget.emplace_back(right, gap);
      budget.emplace_back(left, gap);
    }
    for (Index i = 0; i < n; ++i) {
      LpBuilder::Terms row = balance[static_cast<std::size_t>(i)];
      row.emplace_back(lp.q[static_cast<std::size_t>(i)], 1.0);
      lp.builder.add_eq(std::move(row), p[i]);
    }
    lp.builder.add_le(std::move(budget), eps);
    const LpSolution sol = solve_or_throw(lp.builder.build(), tol);
    return make_result(p, sol.primal.head(n), h, DroMethod::ExactLp, sol.objective);
  }
  require(n <= kMaxTransportPoints, ErrorCode::InvalidArgument,
          "coupling LP is limited to " + std::to_string(kMaxTransportPoints) +
              " points on a non-line metric");
  // pi_ij is the mass moved from i to j.
  LpBuilder b;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) b.add_variable(0.0, kInf, h(j));
  }
  LpBuilder::Terms budget;
  for (Index i = 0; i < n; ++i) {
    LpBuilder::Terms row;
    for (Index j = 0; j < n; ++j) {
      row.emplace_back(i * n + j, 1.0);
      if (i != j) budget.emplace_back(i * n + j, c(i, j));
    }
    b.add_eq(std::move(row), p[i]);
  }
  b.add_le(std::move(budget), eps);
  const LpSolution sol = solve_or_throw(b.build(), tol);
  Vector q = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) q(j) += sol.primal(i * n + j);
  }
  return make_result(p, q, h, DroMethod::ExactLp, sol.objective);
}

std::vector<Vector> dudley_seeds(const SampleSpace& space) {
  const Matrix& c = space.metric();
  const Index n = c.rows();
  std::vector<Vector> seeds;
  for (Index i = 0; i < n; ++i) {
    double nearest = kInf;
    for (Index j = 0; j < n; ++j) {
      if (j != i) nearest = std::min(nearest, c(i, j));
    }
    const double spike_norm = 1.0 + (std::isfinite(nearest) ? 1.0 / nearest : 0.0);
    const Vector spike = Vector::Unit(n, i) / spike_norm;
    const Vector cone = c.col(i) / (c.col(i).maxCoeff() + 1.0);
    seeds.push_back(spike);
    seeds.push_back(-spike);
    seeds.push_back(cone);
    seeds.push_back(-cone);
  }
  return seeds;
}

DroResult dudley_column_generation(const DiscreteDistribution& p, const FunctionClass& cls, double eps,
                                   const Vector& h, const Tolerances& tol) {
  const Index n = h.size();
  std::vector<Vector> members = dudley_seeds(*cls.space());
  for (int round = 0;; ++round) {
    SimplexLp lp(h);
    for (const Vector& f : members) lp.add_member(f, eps + f.dot(p.weights()));
    const LpSolution sol = solve_or_throw(lp.builder.build(), tol);
    const DiscreteDistribution q = DiscreteDistribution::normalized(p.space(), sol.primal.head(n));
    const IpmValue d = ipm_distance(cls, q, p, tol);
    const bool done = d.value <= eps + tol.column_generation || round + 1 >= tol.column_generation_max_rounds;
    if (done) {
      // The master LP relaxes the ball, so its value bounds the optimum from
      // above; shrinking towards P restores feasibility.
      const double shrink = d.value > eps ? eps / d.value : 1.0;
      const Vector feasible = p.weights() + shrink * (q.weights() - p.weights());
      return make_result(p, feasible, h, DroMethod::ColumnGeneration, sol.objective);
    }
    members.push_back(*d.witness);
  }
}

DroResult quadratic_bisection(const DiscreteDistribution& p, const FunctionClass& cls, double eps,
                              const Vector& h, const Tolerances& tol) {
  const QuadraticGeometry& g = cls.quadratic();
  const Matrix& d = g.dual;
  const Vector& pw = p.weights();
  const Index n = h.size();

  SimplexBlocks blocks;
  if (g.blocks.empty()) {
    blocks = SimplexBlocks::single(n);
  } else {
    for (const auto& block : g.blocks) {
      double mass = 0.0;
      for (Index i : block) mass += pw(i);
      blocks.indices.push_back(block);
      blocks.masses.push_back(mass);
    }
  }
  const auto distance = [&](const Vector& q) {
    const Vector v = q - pw;
    return std::sqrt(std::max(0.0, v.dot(d * v)));
  };
  const Vector dp = d * pw;
  const double pdp = pw.dot(dp);

  double best_lower = pw.dot(h);
  Vector best_q = pw;
  double best_upper = kInf;
  struct Evaluation {
    double upper;
    double distance;
  };
  // Dual function: max over the blocks of h'q - lambda (|q - p|_D^2 - eps^2).
  const auto evaluate = [&](double lambda) {
    const QuadraticMaximum inner =
        maximize_concave_quadratic(-lambda * d, h + 2.0 * lambda * dp, blocks, tol.qp_tolerance, tol);
    const double upper = inner.value + inner.gap_bound - lambda * pdp + lambda * eps * eps;
    best_upper = std::min(best_upper, upper);
    const double dist = distance(inner.argmax);
    const double shrink = dist > eps ? eps / dist : 1.0;
    const Vector q = pw + shrink * (inner.argmax - pw);
    const double lower = q.dot(h);
    if (lower > best_lower) {
      best_lower = lower;
      best_q = q;
    }
    return Evaluation{upper, dist};
  };

  const Evaluation at_zero = evaluate(0.0);
  if (at_zero.distance > eps) {
    const double range = h.maxCoeff() - h.minCoeff();
    double hi = std::max(range / (eps * eps), 1e-12);
    for (int k = 0; k < 200 && evaluate(hi).distance > eps; ++k) hi *= 2.0;
    double a = 0.0;
    double b = hi;
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - ratio * (b - a);
    double x2 = a + ratio * (b - a);
    double f1 = evaluate(x1).upper;
    double f2 = evaluate(x2).upper;
    for (int it = 0; it < tol.bisection_iterations; ++it) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - ratio * (b - a);
        f1 = evaluate(x1).upper;
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + ratio * (b - a);
        f2 = evaluate(x2).upper;
      }
    }
  }
  return make_result(p, best_q, h, DroMethod::DualBisection, std::max(best_upper, best_lower));
}

}  // namespace

std::string_view to_string(DroMethod method) noexcept {
  switch (method) {
    case DroMethod::ExactLp: return "exact_lp";
    case DroMethod::ColumnGeneration: return "column_generation";
    case DroMethod::DualBisection: return "dual_bisection";
  }
  return "unknown";
}

DroResult worst_case_expectation(const DiscreteDistribution& p, const FunctionClass& cls, double eps,
                                 const FunctionVec& h, const Tolerances& tol) {
  require(eps >= 0.0, ErrorCode::EpsNegative, "worst_case_expectation needs eps >= 0");
  require(std::isfinite(eps), ErrorCode::NonFiniteValue, "eps must be finite");
  require_same_space(p.space(), h.space(), "worst_case_expectation");
  require_same_space(cls.space(), h.space(), "worst_case_expectation");
  const Vector& v = h.values();
  if (cls.kind() == ClassKind::Zeta) {
    raise(ErrorCode::UnsupportedVariant, "worst_case_expectation does not support zeta balls");
  }
  // A structured ball of radius zero is {P}; an explicit set may still admit
  // other distributions at eps = 0 because the distance is one-sided.
  if (eps == 0.0 && cls.is_structured()) {
    return DroResult{p.weights().dot(v), p, DroMethod::ExactLp, 0.0};
  }
  switch (cls.kind()) {
    case ClassKind::Explicit: return explicit_lp(p, cls, eps, v, tol);
    case ClassKind::SupNorm: return sup_norm_lp(p, eps, v, tol);
    case ClassKind::Lipschitz: return lipschitz_lp(p, cls, eps, v, tol);
    case ClassKind::Dudley: return dudley_column_generation(p, cls, eps, v, tol);
    case ClassKind::Rkhs:
    case ClassKind::Fisher:
    case ClassKind::Sobolev: return quadratic_bisection(p, cls, eps, v, tol);
    case ClassKind::Zeta: break;
  }
  raise(ErrorCode::UnsupportedVariant, "unknown class variant");
}

IdentityReport verify_identity(const DiscreteDistribution& p, const FunctionClass& cls, double eps,
                               const FunctionVec& h, const Tolerances& tol) {
  require(eps > 0.0, ErrorCode::EpsNonPositive, "verify_identity needs eps > 0");
  const DroResult lhs = worst_case_expectation(p, cls, eps, h, tol);
  const PenaltyValue lambda = lambda_penalty(p, cls, eps, h, tol);
  IdentityReport out;
  out.lhs = lhs.value;
  out.e_p_h = expectation(p, h);
  out.lambda_value = lambda.value;
  out.residual = std::abs(out.lhs - (out.e_p_h + out.lambda_value));
  out.lhs_gap = lhs.gap_estimate;
  out.lambda_gap = lambda.gap();
  out.exact = lhs.exact() && lambda.exact;
  return out;
}

BoundReport corollary_bound(const DiscreteDistribution& p, const FunctionClass& cls, double eps,
                            const FunctionVec& h, const Tolerances& tol) {
  require(eps > 0.0, ErrorCode::EpsNonPositive, "corollary_bound needs eps > 0");
  const DroResult lhs = worst_case_expectation(p, cls, eps, h, tol);
  const CenteredPenalty centered = centered_theta(cls, h, tol);
  BoundReport out;
  out.lhs = lhs.value;
  out.e_p_h = expectation(p, h);
  out.b_star = centered.b_star;
  out.centered_theta = centered.penalty.value;
  out.rhs = out.e_p_h + eps * out.centered_theta;
  out.slack = out.rhs - out.lhs;
  out.equality = std::abs(out.slack) <= tol.ball_feasibility;
  return out;
}

TightnessReport tightness_report(const DiscreteDistribution& p, const FunctionClass& cls, double eps,
                                 std::size_t samples, std::uint64_t seed, const Tolerances& tol) {
  require(samples >= 1, ErrorCode::InvalidArgument, "tightness_report needs at least one sample");
  const SpacePtr& space = p.space();
  const Index n = space->dim();
  Rng rng(seed);
  TightnessReport out;
  out.samples = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    // Alternate the scale so that both small and large functions appear.
    const double scale = s % 3 == 2 ? 10.0 : 1.0;
    const FunctionVec a(space, scale * rng.normal_vector(n));
    const FunctionVec b(space, rng.normal_vector(n));
    const PenaltyValue la = lambda_penalty(p, cls, eps, a, tol);
    const PenaltyValue lb = lambda_penalty(p, cls, eps, b, tol);
    const PenaltyValue lab = lambda_penalty(p, cls, eps, a + b, tol);
    // Certified violations: the lower bound of the left side against the
    // attained value of the right side.
    const double bound = std::min(j_penalty(p, a).value, eps * theta(cls, a, tol).value);
    out.max_bound_violation = std::max(out.max_bound_violation, la.lower_bound - bound);
    out.max_subadditivity_violation =
        std::max(out.max_subadditivity_violation, lab.lower_bound - la.value - lb.value);
  }
  return out;
}

}  // namespace ipmdro
