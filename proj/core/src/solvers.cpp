#include "ipmdro/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "ipmdro/error.hpp"

namespace ipmdro {
namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

class BlockGeometry {
 public:
  explicit BlockGeometry(const SimplexBlocks& blocks) : blocks_(blocks) {}

  [[nodiscard]] VectorXd project(const VectorXd& v) const {
    VectorXd out = VectorXd::Zero(v.size());
    for (std::size_t b = 0; b < blocks_.indices.size(); ++b) {
      const auto& idx = blocks_.indices[b];
      VectorXd sub(static_cast<Index>(idx.size()));
      for (std::size_t k = 0; k < idx.size(); ++k) sub(static_cast<Index>(k)) = v(idx[k]);
      const VectorXd proj = project_scaled_simplex(sub, blocks_.masses[b]);
      for (std::size_t k = 0; k < idx.size(); ++k) out(idx[k]) = proj(static_cast<Index>(k));
    }
    return out;
  }

  // sum_b mass_b * max_{i in b} g_i - g'x, the linear-maximization gap.
  [[nodiscard]] double frank_wolfe_gap(const VectorXd& x, const VectorXd& g) const {
    double best = 0.0;
    for (std::size_t b = 0; b < blocks_.indices.size(); ++b) {
      double top = -std::numeric_limits<double>::infinity();
      for (Index i : blocks_.indices[b]) top = std::max(top, g(i));
      best += blocks_.masses[b] * top;
    }
    return std::max(0.0, best - g.dot(x));
  }

  [[nodiscard]] VectorXd vertex(const VectorXd& c) const {
    VectorXd out = VectorXd::Zero(c.size());
    for (std::size_t b = 0; b < blocks_.indices.size(); ++b) {
      Index arg = blocks_.indices[b].front();
      for (Index i : blocks_.indices[b]) {
        if (c(i) > c(arg)) arg = i;
      }
      out(arg) = blocks_.masses[b];
    }
    return out;
  }

  [[nodiscard]] VectorXd barycenter(Index n) const {
    VectorXd out = VectorXd::Zero(n);
    for (std::size_t b = 0; b < blocks_.indices.size(); ++b) {
      const double share = blocks_.masses[b] / static_cast<double>(blocks_.indices[b].size());
      for (Index i : blocks_.indices[b]) out(i) = share;
    }
    return out;
  }

  // Stationary point of the objective restricted to the face spanned by the
  // support of x, with the block masses enforced exactly. Returns nothing
  // when the face solution leaves the face.
  [[nodiscard]] std::optional<VectorXd> face_solution(const MatrixXd& q, const VectorXd& c,
                                                      const VectorXd& x) const {
    const double cutoff = 1e-13;
    std::vector<Index> support;
    std::vector<Index> block_of;
    std::vector<std::size_t> active_blocks;
    for (std::size_t b = 0; b < blocks_.indices.size(); ++b) {
      if (blocks_.masses[b] <= 0.0) continue;
      bool any = false;
      for (Index i : blocks_.indices[b]) {
        if (x(i) > cutoff * blocks_.masses[b]) {
          support.push_back(i);
          block_of.push_back(static_cast<Index>(active_blocks.size()));
          any = true;
        }
      }
      if (!any) return std::nullopt;
      active_blocks.push_back(b);
    }
    const auto s = static_cast<Index>(support.size());
    const auto k = static_cast<Index>(active_blocks.size());
    MatrixXd kkt = MatrixXd::Zero(s + k, s + k);
    VectorXd rhs(s + k);
    for (Index a = 0; a < s; ++a) {
      for (Index b = 0; b < s; ++b) kkt(a, b) = 2.0 * q(support[static_cast<std::size_t>(a)], support[static_cast<std::size_t>(b)]);
      kkt(a, s + block_of[static_cast<std::size_t>(a)]) = -1.0;
      kkt(s + block_of[static_cast<std::size_t>(a)], a) = 1.0;
      rhs(a) = -c(support[static_cast<std::size_t>(a)]);
    }
    for (Index b = 0; b < k; ++b) rhs(s + b) = blocks_.masses[active_blocks[static_cast<std::size_t>(b)]];
    const Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(kkt);
    const VectorXd sol = cod.solve(rhs);
    if (!sol.allFinite() || (kkt * sol - rhs).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff())) {
      return std::nullopt;
    }
    VectorXd out = VectorXd::Zero(x.size());
    for (Index a = 0; a < s; ++a) {
      if (sol(a) < -1e-12) return std::nullopt;
      out(support[static_cast<std::size_t>(a)]) = std::max(sol(a), 0.0);
    }
    return project(out);
  }

 private:
  const SimplexBlocks& blocks_;
};

VectorXd power_start(Index n) {
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v(i) = 1.0 + 0.5 * std::sin(1.7 * static_cast<double>(i) + 0.3);
  return v.normalized();
}

}  // namespace

SimplexBlocks SimplexBlocks::single(Eigen::Index n, double mass) {
  SimplexBlocks blocks;
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  blocks.indices.push_back(std::move(all));
  blocks.masses.push_back(mass);
  return blocks;
}

VectorXd project_scaled_simplex(const VectorXd& v, double mass) {
  const Index n = v.size();
  if (n == 0) return v;
  if (mass <= 0.0) return VectorXd::Zero(n);
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (Index j = 0; j < n; ++j) {
    cumulative += u[static_cast<std::size_t>(j)];
    const double candidate = (cumulative - mass) / static_cast<double>(j + 1);
    if (u[static_cast<std::size_t>(j)] - candidate > 0.0) tau = candidate;
  }
  VectorXd out = (v.array() - tau).cwiseMax(0.0);
  const double total = out.sum();
  if (total > 0.0) out *= mass / total;
  return out;
}

VectorXd project_simplex(const VectorXd& v) {
  require(v.allFinite(), ErrorCode::NonFiniteValue, "projection input must be finite");
  return project_scaled_simplex(v, 1.0);
}

double power_iteration(const MatrixXd& psd, int iterations) {
  if (psd.rows() == 0) return 0.0;
  VectorXd v = power_start(psd.rows());
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const VectorXd w = psd * v;
    const double norm = w.norm();
    if (norm <= 0.0) return 0.0;
    estimate = v.dot(w);
    v = w / norm;
  }
  return std::max(estimate, v.dot(psd * v));
}

QuadraticMaximum maximize_concave_quadratic(const MatrixXd& q_mat, const VectorXd& c,
                                            const SimplexBlocks& blocks, double tol,
                                            const Tolerances& tols) {
  const Index n = c.size();
  require(q_mat.rows() == n && q_mat.cols() == n, ErrorCode::DimensionMismatch,
          "quadratic term must be n x n");
  require(q_mat.allFinite() && c.allFinite(), ErrorCode::NonFiniteValue, "QP data must be finite");
  require(blocks.indices.size() == blocks.masses.size(), ErrorCode::DimensionMismatch,
          "one mass per block");
  const double q_scale = std::max(1.0, n == 0 ? 0.0 : q_mat.cwiseAbs().maxCoeff());
  require((q_mat - q_mat.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * q_scale,
          ErrorCode::InvalidArgument, "quadratic term must be symmetric");
  const MatrixXd q = 0.5 * (q_mat + q_mat.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(q, Eigen::EigenvaluesOnly);
  require(eig.eigenvalues().maxCoeff() <= tols.concavity * q_scale, ErrorCode::NotConcave,
          "quadratic term has a positive eigenvalue");

  const BlockGeometry geometry(blocks);
  const auto objective = [&](const VectorXd& x) { return x.dot(q * x) + c.dot(x); };
  const auto gradient = [&](const VectorXd& x) -> VectorXd { return 2.0 * (q * x) + c; };

  QuadraticMaximum out;
  double lipschitz = 2.0 * power_iteration(-q, tols.power_iterations);
  if (lipschitz <= 1e-14 * q_scale) {
    out.argmax = geometry.vertex(c);
    out.value = objective(out.argmax);
    out.gap_bound = geometry.frank_wolfe_gap(out.argmax, gradient(out.argmax));
    out.converged = true;
    return out;
  }

  VectorXd x = geometry.barycenter(n);
  VectorXd y = x;
  double fx = objective(x);
  double t = 1.0;
  double gap = geometry.frank_wolfe_gap(x, gradient(x));
  auto try_polish = [&]() {
    if (auto face = geometry.face_solution(q, c, x)) {
      const double face_gap = geometry.frank_wolfe_gap(*face, gradient(*face));
      if (face_gap < gap) {
        x = *face;
        y = x;
        fx = objective(x);
        gap = face_gap;
        t = 1.0;
      }
    }
  };

  long it = 0;
  for (; it < tols.qp_max_iterations && gap > tol; ++it) {
    const VectorXd gy = gradient(y);
    const double fy = objective(y);
    VectorXd next;
    while (true) {
      next = geometry.project(y + gy / lipschitz);
      const VectorXd step = next - y;
      if (objective(next) >= fy + gy.dot(step) - 0.5 * lipschitz * step.squaredNorm() - 1e-15 * (1.0 + std::abs(fy))) {
        break;
      }
      lipschitz *= 2.0;
    }
    const double fnext = objective(next);
    if (fnext < fx) {
      // Restart momentum; fall back to a plain projected-gradient step from x.
      t = 1.0;
      y = x;
      continue;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - x);
    x = next;
    fx = fnext;
    t = t_next;
    gap = geometry.frank_wolfe_gap(x, gradient(x));
    if (gap > tol && it % 25 == 0) try_polish();
  }
  if (gap > tol) try_polish();

  out.argmax = x;
  out.value = objective(x);
  out.gap_bound = gap;
  out.iterations = it;
  out.converged = gap <= tol;
  return out;
}

QuadraticMaximum maximize_concave_quadratic_over_simplex(const MatrixXd& q_mat, const VectorXd& c,
                                                         double tol, const Tolerances& tols) {
  return maximize_concave_quadratic(q_mat, c, SimplexBlocks::single(c.size()), tol, tols);
}

ScalarMinimum minimize_scalar_convex(const std::function<double(double)>& f, double lo, double hi,
                                     double tol, int max_iterations) {
  require(lo < hi, ErrorCode::InvalidArgument, "scalar search needs lo < hi");
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo;
  double b = hi;
  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  ScalarMinimum out;
  out.evaluations = 2;
  for (int it = 0; it < max_iterations && (b - a) > tol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = f(x2);
    }
    ++out.evaluations;
  }
  // The bracket endpoints are candidates too when the minimum sits on the
  // boundary of [lo, hi].
  out.argmin = 0.5 * (a + b);
  out.value = f(out.argmin);
  ++out.evaluations;
  for (const double candidate : {x1, x2}) {
    const double value = f(candidate);
    ++out.evaluations;
    if (value < out.value) {
      out.value = value;
      out.argmin = candidate;
    }
  }
  return out;
}

}  // namespace ipmdro
