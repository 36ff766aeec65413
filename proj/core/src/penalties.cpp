#include "ipmdro/penalties.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ipmdro/error.hpp"
#include "ipmdro/solvers.hpp"

namespace ipmdro {
namespace {

using Index = Eigen::Index;
constexpr double kInf = std::numeric_limits<double>::infinity();

PenaltyValue exact_value(double value) {
  PenaltyValue out;
  out.value = value;
  out.lower_bound = value;
  return out;
}

double j_value(const Vector& p, const Vector& h) { return h.maxCoeff() - p.dot(h); }

// Shared LP skeleton for the infimal convolution: variables h2 (free), t
// (free) and the penalty epigraph; objective min t - p'(h - h2) + eps*s.
// Returned as a maximization of the negated objective.
struct LambdaLp {
  LpBuilder builder;
  std::vector<Index> h2;
  Index t = 0;

  LambdaLp(const Vector& p, const Vector& h) {
    const Index n = h.size();
    for (Index i = 0; i < n; ++i) h2.push_back(builder.add_variable(-kInf, kInf, -p(i)));
    t = builder.add_variable(-kInf, kInf, -1.0);
    for (Index i = 0; i < n; ++i) builder.add_ge({{t, 1.0}, {h2[static_cast<std::size_t>(i)], 1.0}}, h(i));
  }

  // The constant term p'h is dropped from the LP objective.
  [[nodiscard]] Vector split(const LpSolution& sol) const {
    Vector out(static_cast<Index>(h2.size()));
    for (std::size_t i = 0; i < h2.size(); ++i) out(static_cast<Index>(i)) = sol.primal(h2[i]);
    return out;
  }
};

// Adds |h2_i - h2_j| <= L c_ij over the Lipschitz pairs of the space.
void add_lipschitz_rows(LambdaLp& lp, const SampleSpace& space, Index slope) {
  const Matrix& c = space.metric();
  for (const auto& [i, j] : space.lipschitz_pairs()) {
    const auto a = lp.h2[i];
    const auto b = lp.h2[j];
    const double cij = c(static_cast<Index>(i), static_cast<Index>(j));
    lp.builder.add_le({{a, 1.0}, {b, -1.0}, {slope, -cij}}, 0.0);
    lp.builder.add_le({{a, -1.0}, {b, 1.0}, {slope, -cij}}, 0.0);
  }
}

void add_sup_rows(LambdaLp& lp, Index bound) {
  for (Index v : lp.h2) {
    lp.builder.add_le({{v, 1.0}, {bound, -1.0}}, 0.0);
    lp.builder.add_le({{v, -1.0}, {bound, -1.0}}, 0.0);
  }
}

PenaltyValue finish_lambda_lp(const LambdaLp& lp, const Vector& p, const Vector& h,
                              const FunctionClass& cls, double eps, const Tolerances& tol) {
  const LpSolution sol = solve_lp(lp.builder.build(), tol);
  require(sol.status == LpStatus::Optimal, ErrorCode::NumericalBreakdown,
          "infimal convolution LP did not reach an optimum");
  const Vector h2 = lp.split(sol);
  const Vector h1 = h - h2;
  // The decomposition reproduces the LP value up to solver precision; the
  // LP value itself is the reported optimum.
  const double lp_value = std::max(0.0, -sol.objective - p.dot(h));
  const double split_value = j_value(p, h1) + eps * class_norm(cls, h2);
  PenaltyValue out = exact_value(std::min(lp_value, split_value));
  out.decomposition = Decomposition{h1, h2};
  return out;
}

PenaltyValue lambda_explicit(const Vector& p, const FunctionClass& cls, double eps, const Vector& h,
                             const Tolerances& tol) {
  // Eliminating h1 = h - F w leaves t + (F w)_i >= h_i with cost
  // t + (F'p + eps)'w - p'h.
  const Matrix& f = cls.members();
  const Index n = h.size();
  const Index m = f.cols();
  LpBuilder b;
  std::vector<Index> w;
  for (Index k = 0; k < m; ++k) w.push_back(b.add_variable(0.0, kInf, -(f.col(k).dot(p) + eps)));
  const Index t = b.add_variable(-kInf, kInf, -1.0);
  for (Index i = 0; i < n; ++i) {
    LpBuilder::Terms row{{t, 1.0}};
    for (Index k = 0; k < m; ++k) {
      if (f(i, k) != 0.0) row.emplace_back(w[static_cast<std::size_t>(k)], f(i, k));
    }
    b.add_ge(std::move(row), h(i));
  }
  const LpSolution sol = solve_lp(b.build(), tol);
  require(sol.status == LpStatus::Optimal, ErrorCode::NumericalBreakdown,
          "infimal convolution LP did not reach an optimum");
  Vector weights(m);
  for (Index k = 0; k < m; ++k) weights(k) = std::max(0.0, sol.primal(w[static_cast<std::size_t>(k)]));
  const Vector h2 = f * weights;
  PenaltyValue out = exact_value(std::max(0.0, -sol.objective - p.dot(h)));
  out.weights = weights;
  out.decomposition = Decomposition{h - h2, h2};
  return out;
}

// Kelley cutting planes on s >= ||h2||_M. Each cut g'h2 <= s uses a dual
// vector with g' M^+ g = 1, so the LP is a relaxation and its value a lower
// bound; the incumbent split gives the upper bound.
PenaltyValue lambda_quadratic(const Vector& p, const FunctionClass& cls, double eps, const Vector& h,
                              const Tolerances& tol) {
  const QuadraticGeometry& g = cls.quadratic();
  const Index n = h.size();
  const double cutoff = tol.pinv_cutoff * std::max(1.0, g.primal_eigenvalues.cwiseAbs().maxCoeff());
  std::vector<Vector> cuts;
  for (Index k = 0; k < n; ++k) {
    const double lambda = g.primal_eigenvalues(k);
    if (lambda <= cutoff) continue;
    const Vector v = std::sqrt(lambda) * g.primal_eigenvectors.col(k);
    cuts.push_back(v);
    cuts.push_back(-v);
  }
  const auto norm = [&](const Vector& v) { return std::sqrt(std::max(0.0, v.dot(g.primal * v))); };

  PenaltyValue out = exact_value(j_value(p, h));
  out.decomposition = Decomposition{h, Vector::Zero(n)};
  out.lower_bound = 0.0;
  out.exact = false;
  out.converged = false;
  if (out.value <= 0.0) {
    out.converged = true;
    return out;
  }
  for (int it = 0; it < tol.cutting_plane_max_iterations; ++it) {
    LambdaLp lp(p, h);
    const Index s = lp.builder.add_variable(0.0, kInf, -eps);
    for (const Vector& cut : cuts) {
      LpBuilder::Terms row{{s, -1.0}};
      for (Index i = 0; i < n; ++i) {
        if (cut(i) != 0.0) row.emplace_back(lp.h2[static_cast<std::size_t>(i)], cut(i));
      }
      lp.builder.add_le(std::move(row), 0.0);
    }
    const LpSolution sol = solve_lp(lp.builder.build(), tol);
    require(sol.status == LpStatus::Optimal, ErrorCode::NumericalBreakdown,
            "cutting-plane LP did not reach an optimum");
    out.lower_bound = std::clamp(-sol.objective - p.dot(h), out.lower_bound, out.value);
    const Vector h2 = lp.split(sol);
    const double candidate = j_value(p, h - h2) + eps * norm(h2);
    if (candidate < out.value) {
      out.value = candidate;
      out.decomposition = Decomposition{h - h2, h2};
    }
    if (out.value - out.lower_bound <= tol.cutting_plane_gap * (1.0 + out.value)) {
      out.converged = true;
      break;
    }
    const double h2_norm = norm(h2);
    if (h2_norm <= 0.0) break;
    cuts.push_back(g.primal * h2 / h2_norm);
  }
  return out;
}

}  // namespace

PenaltyValue gauge_explicit(const FunctionClass& cls, const FunctionVec& h, const Tolerances& tol) {
  require_same_space(cls.space(), h.space(), "gauge_explicit");
  const Matrix& f = cls.members();
  require(f.cols() > 0, ErrorCode::InvalidArgument, "explicit set must be nonempty");
  if (h.values().cwiseAbs().maxCoeff() == 0.0) {
    PenaltyValue out = exact_value(0.0);
    out.weights = Vector::Zero(f.cols());
    return out;
  }
  LpBuilder b;
  std::vector<Index> w;
  for (Index k = 0; k < f.cols(); ++k) w.push_back(b.add_variable(0.0, kInf, -1.0));
  for (Index i = 0; i < f.rows(); ++i) {
    LpBuilder::Terms row;
    for (Index k = 0; k < f.cols(); ++k) {
      if (f(i, k) != 0.0) row.emplace_back(w[static_cast<std::size_t>(k)], f(i, k));
    }
    b.add_eq(std::move(row), h[i]);
  }
  const LpSolution sol = solve_lp(b.build(), tol);
  if (sol.status == LpStatus::Infeasible) return exact_value(kInf);
  require(sol.status == LpStatus::Optimal, ErrorCode::NumericalBreakdown, "gauge LP is unbounded");
  PenaltyValue out = exact_value(std::max(0.0, -sol.objective));
  out.weights = sol.primal.head(f.cols()).cwiseMax(0.0);
  return out;
}

PenaltyValue theta_closed_form(const FunctionClass& cls, const FunctionVec& h) {
  require_same_space(cls.space(), h.space(), "theta_closed_form");
  require(cls.is_structured() && cls.kind() != ClassKind::Zeta, ErrorCode::UnsupportedVariant,
          "closed-form gauge needs one of the structured balls");
  return exact_value(class_norm(cls, h.values()));
}

PenaltyValue gauge_from_zeta(const FunctionClass& cls, const FunctionVec& h) {
  require_same_space(cls.space(), h.space(), "gauge_from_zeta");
  const ZetaBall& z = cls.zeta();
  PenaltyValue out = exact_value(class_norm(cls, h.values()));
  out.upper_bound_only = !z.convex;
  if (out.upper_bound_only) out.lower_bound = 0.0;
  return out;
}

PenaltyValue theta(const FunctionClass& cls, const FunctionVec& h, const Tolerances& tol) {
  switch (cls.kind()) {
    case ClassKind::Explicit: return gauge_explicit(cls, h, tol);
    case ClassKind::Zeta: return gauge_from_zeta(cls, h);
    default: return theta_closed_form(cls, h);
  }
}

PenaltyValue j_penalty(const DiscreteDistribution& p, const FunctionVec& h) {
  require_same_space(p.space(), h.space(), "j_penalty");
  Index arg = 0;
  const double top = h.values().maxCoeff(&arg);
  PenaltyValue out = exact_value(std::max(0.0, top - p.weights().dot(h.values())));
  out.argmax = arg;
  return out;
}

CenteredPenalty centered_theta(const FunctionClass& cls, const FunctionVec& h, const Tolerances& tol) {
  require_same_space(cls.space(), h.space(), "centered_theta");
  const Vector& v = h.values();
  const Index n = v.size();
  const auto shifted = [&](double b) { return FunctionVec(h.space(), (v.array() - b).matrix()); };
  switch (cls.kind()) {
    case ClassKind::Lipschitz:
    case ClassKind::Sobolev:
      return {0.0, theta_closed_form(cls, h)};
    case ClassKind::SupNorm: {
      const double b = 0.5 * (v.maxCoeff() + v.minCoeff());
      return {b, exact_value(0.5 * (v.maxCoeff() - v.minCoeff()))};
    }
    case ClassKind::Fisher:
    case ClassKind::Rkhs: {
      // Minimizer of (h - b)' M (h - b): b = 1'M h / 1'M 1.
      const Matrix& m = cls.quadratic().primal;
      const Vector ones = Vector::Ones(n);
      const double denom = ones.dot(m * ones);
      const double b = denom > 0.0 ? ones.dot(m * v) / denom : 0.0;
      return {b, theta_closed_form(cls, shifted(b))};
    }
    case ClassKind::Explicit: {
      const Matrix& f = cls.members();
      LpBuilder builder;
      for (Index k = 0; k < f.cols(); ++k) builder.add_variable(0.0, kInf, -1.0);
      const Index b = builder.add_variable(-kInf, kInf, 0.0);
      for (Index i = 0; i < n; ++i) {
        LpBuilder::Terms row{{b, 1.0}};
        for (Index k = 0; k < f.cols(); ++k) {
          if (f(i, k) != 0.0) row.emplace_back(k, f(i, k));
        }
        builder.add_eq(std::move(row), v(i));
      }
      const LpSolution sol = solve_lp(builder.build(), tol);
      if (sol.status == LpStatus::Infeasible) return {0.0, exact_value(kInf)};
      require(sol.status == LpStatus::Optimal, ErrorCode::NumericalBreakdown,
              "centered gauge LP is unbounded");
      PenaltyValue out = exact_value(std::max(0.0, -sol.objective));
      out.weights = sol.primal.head(f.cols()).cwiseMax(0.0);
      return {sol.primal(b), out};
    }
    case ClassKind::Dudley:
    case ClassKind::Zeta: {
      const double lo = v.minCoeff();
      const double hi = v.maxCoeff();
      if (hi - lo <= 0.0) return {lo, theta(cls, shifted(lo), tol)};
      const auto objective = [&](double b) { return class_norm(cls, (v.array() - b).matrix()); };
      const ScalarMinimum best = minimize_scalar_convex(objective, lo, hi, 1e-12 * (1.0 + hi - lo));
      return {best.argmin, theta(cls, shifted(best.argmin), tol)};
    }
  }
  raise(ErrorCode::UnsupportedVariant, "unknown class variant");
}

PenaltyValue lambda_penalty(const DiscreteDistribution& p, const FunctionClass& cls, double eps,
                            const FunctionVec& h, const Tolerances& tol) {
  require(eps > 0.0, ErrorCode::EpsNonPositive, "lambda_penalty needs eps > 0");
  require(std::isfinite(eps), ErrorCode::NonFiniteValue, "eps must be finite");
  require_same_space(p.space(), h.space(), "lambda_penalty");
  require_same_space(cls.space(), h.space(), "lambda_penalty");
  const Vector& pw = p.weights();
  const Vector& v = h.values();
  if (v.maxCoeff() - v.minCoeff() == 0.0) {
    PenaltyValue out = exact_value(0.0);
    out.decomposition = Decomposition{v, Vector::Zero(v.size())};
    return out;
  }
  switch (cls.kind()) {
    case ClassKind::Explicit: return lambda_explicit(pw, cls, eps, v, tol);
    case ClassKind::SupNorm: {
      LambdaLp lp(pw, v);
      add_sup_rows(lp, lp.builder.add_variable(0.0, kInf, -eps));
      return finish_lambda_lp(lp, pw, v, cls, eps, tol);
    }
    case ClassKind::Lipschitz: {
      LambdaLp lp(pw, v);
      add_lipschitz_rows(lp, *cls.space(), lp.builder.add_variable(0.0, kInf, -eps));
      return finish_lambda_lp(lp, pw, v, cls, eps, tol);
    }
    case ClassKind::Dudley: {
      LambdaLp lp(pw, v);
      add_sup_rows(lp, lp.builder.add_variable(0.0, kInf, -eps));
      add_lipschitz_rows(lp, *cls.space(), lp.builder.add_variable(0.0, kInf, -eps));
      return finish_lambda_lp(lp, pw, v, cls, eps, tol);
    }
    case ClassKind::Rkhs:
    case ClassKind::Fisher:
    case ClassKind::Sobolev:
      return lambda_quadratic(pw, cls, eps, v, tol);
    case ClassKind::Zeta:
      raise(ErrorCode::UnsupportedVariant, "lambda_penalty does not support zeta balls");
  }
  raise(ErrorCode::UnsupportedVariant, "unknown class variant");
}

}  // namespace ipmdro
