#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <variant>
#include <vector>

#include "ipmdro/space.hpp"
#include "ipmdro/tolerances.hpp"

namespace ipmdro {

enum class ClassKind { Explicit, Lipschitz, SupNorm, Rkhs, Fisher, Sobolev, Dudley, Zeta };

std::string_view to_string(ClassKind kind) noexcept;

/// Quadratic (semi)norm data for the Fisher, Sobolev and RKHS balls.
///   penalty:  Theta(h)^2 = h' primal h
///   distance: d(Q, P)^2  = v' dual v   with v = q - p
/// `dual` is the pseudoinverse of `primal` on its range. A difference v has
/// finite distance only when it carries zero net mass on every block; blocks
/// of size one are points whose mass can never move.
struct QuadraticGeometry {
  Matrix primal;
  Matrix dual;
  Vector primal_eigenvalues;
  Matrix primal_eigenvectors;
  std::vector<std::vector<Eigen::Index>> blocks;

  [[nodiscard]] bool finite_distance(const Vector& difference, double tol) const;
};

struct ExplicitSet {
  Matrix members;  // n x m, one function per column
};
struct LipschitzBall {};
struct SupNormBall {};
struct RkhsBall {
  Matrix gram;
  QuadraticGeometry geometry;
};
struct FisherBall {
  DiscreteDistribution mu;
  bool allow_infinite = false;
  QuadraticGeometry geometry;
};
struct SobolevBall {
  DiscreteDistribution mu;
  bool allow_infinite = false;
  Matrix laplacian;
  QuadraticGeometry geometry;
};
struct DudleyBall {};

using ZetaFunction = std::function<double(const Vector&)>;
/// Sublevel set {h : zeta(h) <= 1} of a positively homogeneous functional.
struct ZetaBall {
  ZetaFunction zeta;
  double degree = 1.0;
  bool convex = true;
};

/// A discriminator / test-function set F. Immutable once built.
class FunctionClass {
 public:
  using Variant = std::variant<ExplicitSet, LipschitzBall, SupNormBall, RkhsBall, FisherBall,
                               SobolevBall, DudleyBall, ZetaBall>;

  static FunctionClass explicit_set(const std::vector<FunctionVec>& functions);
  static FunctionClass explicit_set(SpacePtr space, Matrix members);
  /// {h : Lip_c(h) <= 1}. Needs a metric.
  static FunctionClass lipschitz_ball(SpacePtr space);
  /// {h : ||h||_inf <= 1}.
  static FunctionClass sup_norm_ball(SpacePtr space);
  /// {h : ||h||_k <= 1} for a positive-definite Gram matrix.
  static FunctionClass rkhs_ball(SpacePtr space, Matrix gram,
                                 const Tolerances& tol = default_tolerances());
  /// {h : E_mu[h^2] <= 1}. Zero-mass points are rejected unless
  /// `allow_infinite` is set, in which case distances moving mass onto or off
  /// them evaluate to +infinity.
  static FunctionClass fisher_ball(const DiscreteDistribution& mu, bool allow_infinite = false,
                                   const Tolerances& tol = default_tolerances());
  /// {h : sum_i mu_i sum_{j ~ i} w_ij (h_j - h_i)^2 <= 1}. Needs a graph;
  /// a disconnected graph follows the same opt-in rule as zero mass.
  static FunctionClass sobolev_ball(const DiscreteDistribution& mu, bool allow_infinite = false,
                                    const Tolerances& tol = default_tolerances());
  /// {h : ||h||_inf + Lip_c(h) <= 1}. Needs a metric.
  static FunctionClass dudley_ball(SpacePtr space);
  /// {h : zeta(h) <= 1}; homogeneity of degree `degree` is spot-checked on
  /// random pairs (a, h) drawn from `check_seed`.
  static FunctionClass zeta_ball(SpacePtr space, ZetaFunction zeta, double degree, bool convex,
                                 std::uint64_t check_seed = 0,
                                 const Tolerances& tol = default_tolerances());

  [[nodiscard]] ClassKind kind() const noexcept;
  [[nodiscard]] const SpacePtr& space() const noexcept { return space_; }
  [[nodiscard]] const Variant& variant() const noexcept { return variant_; }
  [[nodiscard]] std::string_view name() const noexcept { return to_string(kind()); }

  [[nodiscard]] bool is_structured() const noexcept { return kind() != ClassKind::Explicit; }
  [[nodiscard]] bool is_polyhedral() const noexcept;
  [[nodiscard]] bool is_quadratic() const noexcept;
  /// Structured balls are even by construction; explicit sets are checked
  /// member by member; zeta balls are not known to be even.
  [[nodiscard]] bool is_even(double tol = 1e-12) const;

  /// Column matrix of an explicit set. Throws UnsupportedVariant otherwise.
  [[nodiscard]] const Matrix& members() const;
  [[nodiscard]] std::size_t member_count() const;
  [[nodiscard]] FunctionVec member(std::size_t index) const;
  /// Quadratic data of the Fisher, Sobolev and RKHS balls.
  [[nodiscard]] const QuadraticGeometry& quadratic() const;
  [[nodiscard]] const ZetaBall& zeta() const;

 private:
  FunctionClass(SpacePtr space, Variant variant)
      : space_(std::move(space)), variant_(std::move(variant)) {}

  SpacePtr space_;
  Variant variant_;
};

/// Discrete Lipschitz constant max |h_i - h_j| / c(i, j).
double lipschitz_constant(const SampleSpace& space, const Vector& h);

/// The functional zeta_F with F = {h : zeta_F(h) <= 1}, written as a norm
/// (square root taken for the quadratic classes). Not defined for explicit
/// sets.
double class_norm(const FunctionClass& cls, const Vector& h);

struct SymmetrizeResult {
  FunctionClass cls;
  bool already_even = false;
};

/// Closes an explicit set under negation, removing duplicates. Structured
/// balls come back unchanged with `already_even` set; zeta balls throw
/// UnsupportedVariant.
SymmetrizeResult symmetrize_class(const FunctionClass& cls);

/// Explicit subset of a structured class: `budget` functions with class norm
/// one. The sequence for a seed is prefix-stable, so larger budgets give
/// nested sets.
FunctionClass discretize_structured_class(const FunctionClass& cls, std::size_t budget,
                                          std::uint64_t seed);

}  // namespace ipmdro
