#include "ipmdro/ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ipmdro/error.hpp"
#include "ipmdro/solvers.hpp"

namespace ipmdro {
namespace {

using Index = Eigen::Index;
constexpr double kInf = std::numeric_limits<double>::infinity();

IpmValue line_transport(const SampleSpace& space, const Vector& q, const Vector& p) {
  const auto& order = space.line_order();
  const Matrix& c = space.metric();
  const Index n = q.size();
  IpmValue out;
  Vector witness = Vector::Zero(n);
  double cumulative = 0.0;
  double cost = 0.0;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    const auto a = static_cast<Index>(order[k]);
    const auto b = static_cast<Index>(order[k + 1]);
    cumulative += q(a) - p(a);
    const double gap = c(a, b);
    cost += std::abs(cumulative) * gap;
    const double sign = cumulative > 0.0 ? 1.0 : (cumulative < 0.0 ? -1.0 : 0.0);
    witness(b) = witness(a) - sign * gap;
  }

  // Monotone coupling along the line.
  Matrix plan = Matrix::Zero(n, n);
  std::size_t i = 0;
  std::size_t j = 0;
  double left_q = order.empty() ? 0.0 : q(static_cast<Index>(order[0]));
  double left_p = order.empty() ? 0.0 : p(static_cast<Index>(order[0]));
  while (i < order.size() && j < order.size()) {
    const double moved = std::min(left_q, left_p);
    plan(static_cast<Index>(order[i]), static_cast<Index>(order[j])) += moved;
    left_q -= moved;
    left_p -= moved;
    if (left_q <= left_p) {
      if (++i < order.size()) left_q = q(static_cast<Index>(order[i]));
    } else {
      if (++j < order.size()) left_p = p(static_cast<Index>(order[j]));
    }
  }
  out.value = cost;
  out.witness = witness;
  out.transport_plan = plan;
  return out;
}

IpmValue coupling_transport(const SampleSpace& space, const Vector& q, const Vector& p,
                            const Tolerances& tol) {
  const Index n = q.size();
  require(n <= kMaxTransportPoints, ErrorCode::InvalidArgument,
          "transport LP is limited to " + std::to_string(kMaxTransportPoints) +
              " points on a non-line metric");
  const Matrix& c = space.metric();
  LpBuilder b;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) b.add_variable(0.0, kInf, -c(i, j));
  }
  for (Index i = 0; i < n; ++i) {
    LpBuilder::Terms row;
    for (Index j = 0; j < n; ++j) row.emplace_back(i * n + j, 1.0);
    b.add_eq(std::move(row), q(i));
  }
  for (Index j = 0; j < n; ++j) {
    LpBuilder::Terms col;
    for (Index i = 0; i < n; ++i) col.emplace_back(i * n + j, 1.0);
    b.add_eq(std::move(col), p(j));
  }
  const LpSolution sol = solve_lp(b.build(), tol);
  require(sol.status == LpStatus::Optimal, ErrorCode::NumericalBreakdown,
          "transport LP did not reach an optimum");
  IpmValue out;
  out.value = std::max(0.0, -sol.objective);
  Matrix plan(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) plan(i, j) = std::max(0.0, sol.primal(i * n + j));
  }
  out.transport_plan = plan;
  // Column potentials g_j = -z_j satisfy f_i + g_j <= c_ij; their c-transform
  // is 1-Lipschitz and attains the transport cost.
  const Vector g = -sol.eq_duals.tail(n);
  Vector witness(n);
  for (Index i = 0; i < n; ++i) witness(i) = (c.row(i).transpose() - g).minCoeff();
  out.witness = witness;
  return out;
}

IpmValue dudley_distance(const SampleSpace& space, const Vector& diff, const Tolerances& tol) {
  const Index n = diff.size();
  const Matrix& c = space.metric();
  LpBuilder b;
  for (Index i = 0; i < n; ++i) b.add_variable(-kInf, kInf, diff(i));
  const Index sup = b.add_variable(0.0, kInf, 0.0);
  const Index slope = b.add_variable(0.0, kInf, 0.0);
  b.add_le({{sup, 1.0}, {slope, 1.0}}, 1.0);
  for (Index i = 0; i < n; ++i) {
    b.add_le({{i, 1.0}, {sup, -1.0}}, 0.0);
    b.add_le({{i, -1.0}, {sup, -1.0}}, 0.0);
  }
  for (const auto& [i, j] : space.lipschitz_pairs()) {
    const auto a = static_cast<Index>(i);
    const auto bb = static_cast<Index>(j);
    b.add_le({{a, 1.0}, {bb, -1.0}, {slope, -c(a, bb)}}, 0.0);
    b.add_le({{a, -1.0}, {bb, 1.0}, {slope, -c(a, bb)}}, 0.0);
  }
  const LpSolution sol = solve_lp(b.build(), tol);
  require(sol.status == LpStatus::Optimal, ErrorCode::NumericalBreakdown,
          "Dudley LP did not reach an optimum");
  IpmValue out;
  out.value = std::max(0.0, sol.objective);
  out.witness = Vector(sol.primal.head(n));
  return out;
}

IpmValue quadratic_distance(const QuadraticGeometry& g, const Vector& diff, double mass_tol) {
  IpmValue out;
  if (!g.finite_distance(diff, mass_tol)) {
    out.value = kInf;
    return out;
  }
  const Vector dv = g.dual * diff;
  out.value = std::sqrt(std::max(0.0, diff.dot(dv)));
  if (out.value > 0.0) out.witness = Vector(dv / out.value);
  return out;
}

}  // namespace

IpmValue wasserstein1(const SampleSpace& space, const Vector& q, const Vector& p, const Tolerances& tol) {
  require(q.size() == space.dim() && p.size() == space.dim(), ErrorCode::DimensionMismatch,
          "distribution dimension does not match the space");
  if (space.is_line_metric()) return line_transport(space, q, p);
  return coupling_transport(space, q, p, tol);
}

IpmValue ipm_distance(const FunctionClass& cls, const DiscreteDistribution& q,
                      const DiscreteDistribution& p, const Tolerances& tol) {
  require_same_space(q.space(), p.space(), "ipm_distance");
  require_same_space(cls.space(), p.space(), "ipm_distance");
  const Vector diff = q.weights() - p.weights();
  const Index n = diff.size();
  switch (cls.kind()) {
    case ClassKind::Explicit: {
      const Matrix& f = cls.members();
      require(f.cols() > 0, ErrorCode::InvalidArgument, "explicit set must be nonempty");
      Index best = 0;
      const Vector scores = f.transpose() * diff;
      IpmValue out;
      out.value = scores.maxCoeff(&best);
      out.witness = Vector(f.col(best));
      return out;
    }
    case ClassKind::SupNorm: {
      IpmValue out;
      out.value = diff.lpNorm<1>();
      Vector sign(n);
      for (Index i = 0; i < n; ++i) sign(i) = diff(i) > 0.0 ? 1.0 : (diff(i) < 0.0 ? -1.0 : 0.0);
      out.witness = sign;
      return out;
    }
    case ClassKind::Lipschitz:
      return wasserstein1(*cls.space(), q.weights(), p.weights(), tol);
    case ClassKind::Dudley:
      return dudley_distance(*cls.space(), diff, tol);
    case ClassKind::Rkhs:
    case ClassKind::Fisher:
    case ClassKind::Sobolev:
      return quadratic_distance(cls.quadratic(), diff, tol.distribution_sum * 10.0);
    case ClassKind::Zeta:
      raise(ErrorCode::UnsupportedVariant, "ipm_distance does not support zeta balls");
  }
  raise(ErrorCode::UnsupportedVariant, "unknown class variant");
}

}  // namespace ipmdro
