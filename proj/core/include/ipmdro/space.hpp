#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ipmdro/tolerances.hpp"

namespace ipmdro {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Edge {
  std::size_t from = 0;
  std::size_t to = 0;
  double weight = 1.0;
};

class SampleSpace;
using SpacePtr = std::shared_ptr<const SampleSpace>;

/// Finite ground set. Labels are opaque; every numerical routine works on
/// point indices. The optional metric is the ground cost used by the
/// Lipschitz and Dudley classes, the optional graph feeds the Sobolev class.
class SampleSpace {
 public:
  /// Validates and builds a space. Throws TriangleInequalityViolated,
  /// AsymmetricMetric, NonPositiveMetric, SelfLoop or InvalidEdge.
  static SpacePtr make(std::vector<std::string> labels,
                       std::optional<Matrix> metric = std::nullopt,
                       std::optional<std::vector<Edge>> graph = std::nullopt,
                       const Tolerances& tol = default_tolerances());

  /// Points t_0..t_{n-1} on the real line with metric |t_i - t_j|.
  static SpacePtr line_grid(const std::vector<double>& coordinates);

  [[nodiscard]] std::size_t size() const noexcept { return labels_.size(); }
  [[nodiscard]] Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(labels_.size()); }
  [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }

  [[nodiscard]] bool has_metric() const noexcept { return metric_.has_value(); }
  /// Throws MissingMetric when absent.
  [[nodiscard]] const Matrix& metric() const;

  [[nodiscard]] bool has_graph() const noexcept { return graph_.has_value(); }
  /// Throws MissingGraph when absent.
  [[nodiscard]] const std::vector<Edge>& edges() const;

  /// True when the metric embeds isometrically in the real line; the
  /// Lipschitz seminorm and transport problems then only need neighbouring
  /// pairs along `line_order()`.
  [[nodiscard]] bool is_line_metric() const noexcept { return !line_order_.empty(); }
  [[nodiscard]] const std::vector<std::size_t>& line_order() const noexcept { return line_order_; }

  /// Index pairs (i, j) whose slopes |h_i - h_j| / c(i, j) determine the
  /// Lipschitz constant: neighbours on a line metric, all pairs otherwise.
  [[nodiscard]] const std::vector<std::pair<std::size_t, std::size_t>>& lipschitz_pairs() const;

 private:
  SampleSpace() = default;

  std::vector<std::string> labels_;
  std::optional<Matrix> metric_;
  std::optional<std::vector<Edge>> graph_;
  std::vector<std::size_t> line_order_;
  std::vector<std::pair<std::size_t, std::size_t>> lipschitz_pairs_;
};

inline SpacePtr make_space(std::vector<std::string> labels,
                           std::optional<Matrix> metric = std::nullopt,
                           std::optional<std::vector<Edge>> graph = std::nullopt) {
  return SampleSpace::make(std::move(labels), std::move(metric), std::move(graph));
}

/// Probability vector on a space.
class DiscreteDistribution {
 public:
  /// Throws InvalidDistribution unless every weight is >= 0 and the sum is 1
  /// within `tol.distribution_sum`.
  static DiscreteDistribution make(SpacePtr space, Vector weights,
                                   const Tolerances& tol = default_tolerances());
  /// Clips negatives to zero and rescales to unit mass.
  static DiscreteDistribution normalized(SpacePtr space, const Vector& weights);
  static DiscreteDistribution uniform(SpacePtr space);
  static DiscreteDistribution point_mass(SpacePtr space, std::size_t index);

  [[nodiscard]] const SpacePtr& space() const noexcept { return space_; }
  [[nodiscard]] const Vector& weights() const noexcept { return weights_; }
  [[nodiscard]] double operator[](Eigen::Index i) const { return weights_(i); }
  [[nodiscard]] Eigen::Index dim() const noexcept { return weights_.size(); }
  [[nodiscard]] bool has_full_support() const noexcept { return (weights_.array() > 0.0).all(); }

 private:
  DiscreteDistribution(SpacePtr space, Vector weights)
      : space_(std::move(space)), weights_(std::move(weights)) {}

  SpacePtr space_;
  Vector weights_;
};

/// Bounded real function on a space, stored pointwise.
class FunctionVec {
 public:
  /// Throws DimensionMismatch or NonFiniteValue.
  FunctionVec(SpacePtr space, Vector values);

  static FunctionVec constant(SpacePtr space, double value);
  static FunctionVec zero(SpacePtr space) { return constant(std::move(space), 0.0); }

  [[nodiscard]] const SpacePtr& space() const noexcept { return space_; }
  [[nodiscard]] const Vector& values() const noexcept { return values_; }
  [[nodiscard]] double operator[](Eigen::Index i) const { return values_(i); }
  [[nodiscard]] Eigen::Index dim() const noexcept { return values_.size(); }
  [[nodiscard]] double max() const { return values_.maxCoeff(); }
  [[nodiscard]] double min() const { return values_.minCoeff(); }

  FunctionVec operator-() const;
  friend FunctionVec operator+(const FunctionVec& a, const FunctionVec& b);
  friend FunctionVec operator-(const FunctionVec& a, const FunctionVec& b);
  friend FunctionVec operator*(double scale, const FunctionVec& f);
  /// h + c for a constant c.
  [[nodiscard]] FunctionVec shifted(double offset) const;

 private:
  SpacePtr space_;
  Vector values_;
};

/// E_P[h].
double expectation(const DiscreteDistribution& p, const FunctionVec& h);

/// Throws SpaceMismatch unless both objects live on the same space.
void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* context);

}  // namespace ipmdro
