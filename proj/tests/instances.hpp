#pragma once

// Random instance generators shared by the unit tests and the acceptance run.

#include <cmath>
#include <string>
#include <tuple>
#include <vector>

#include "ipmdro/function_class.hpp"
#include "ipmdro/random.hpp"
#include "ipmdro/space.hpp"

namespace testing_support {

using namespace ipmdro;

inline std::vector<std::string> labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("w" + std::to_string(i));
  return out;
}

inline SpacePtr plain_space(std::size_t n) { return SampleSpace::make(labels(n)); }

/// Unit-spaced path 0, 1, ..., n-1.
inline SpacePtr path_space(std::size_t n) {
  std::vector<double> t;
  for (std::size_t i = 0; i < n; ++i) t.push_back(static_cast<double>(i));
  return SampleSpace::line_grid(t);
}

/// Points in the plane with the Euclidean metric: never a line metric for n >= 3 in general position.
inline SpacePtr planar_space(std::size_t n, Rng& rng) {
  Matrix xy(static_cast<Eigen::Index>(n), 2);
  for (Eigen::Index i = 0; i < xy.rows(); ++i) xy.row(i) << rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0);
  Matrix c = Matrix::Zero(xy.rows(), xy.rows());
  for (Eigen::Index i = 0; i < xy.rows(); ++i)
    for (Eigen::Index j = 0; j < xy.rows(); ++j) c(i, j) = (xy.row(i) - xy.row(j)).norm();
  return SampleSpace::make(labels(n), c);
}

/// Path graph plus random chords with weights in [0.5, 2].
inline SpacePtr graph_space(std::size_t n, Rng& rng) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, rng.uniform(0.5, 2.0)});
  for (std::size_t i = 0; i + 2 < n; ++i)
    if (rng.uniform() < 0.4) edges.push_back({i, i + 2, rng.uniform(0.5, 2.0)});
  return SampleSpace::make(labels(n), std::nullopt, edges);
}

/// A distribution with every weight at least `floor` before renormalization.
inline DiscreteDistribution random_distribution(const SpacePtr& space, Rng& rng, double floor = 0.0) {
  Vector w = rng.simplex_point(space->dim()).array() + floor;
  return DiscreteDistribution::normalized(space, w);
}

inline FunctionVec random_function(const SpacePtr& space, Rng& rng, double scale = 1.0) {
  return FunctionVec(space, scale * rng.normal_vector(space->dim()));
}

/// `m` random normal functions, their negatives and the signed unit vectors.
inline FunctionClass random_even_explicit(const SpacePtr& space, std::size_t m, Rng& rng) {
  const Eigen::Index n = space->dim();
  Matrix members(n, static_cast<Eigen::Index>(2 * m) + 2 * n);
  Eigen::Index col = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const Vector f = rng.normal_vector(n);
    members.col(col++) = f;
    members.col(col++) = -f;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    members.col(col++) = Vector::Unit(n, i);
    members.col(col++) = -Vector::Unit(n, i);
  }
  return FunctionClass::explicit_set(space, members);
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
  const Vector v = rng.uniform_vector(rows * cols, lo, hi);
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

/// Gaussian Gram matrix of random points on the line.
inline Matrix random_gram(Eigen::Index n, Rng& rng) {
  Vector t(n);
  for (Eigen::Index i = 0; i < n; ++i) t(i) = static_cast<double>(i) + rng.uniform(-0.3, 0.3);
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) k(i, j) = std::exp(-0.5 * (t(i) - t(j)) * (t(i) - t(j)));
  return k;
}

/// Edge list of a space graph in the oracle's tuple form.
inline std::vector<std::tuple<int, int, double>> edge_tuples(const SampleSpace& space) {
  std::vector<std::tuple<int, int, double>> out;
  for (const auto& e : space.edges()) out.emplace_back(static_cast<int>(e.from), static_cast<int>(e.to), e.weight);
  return out;
}

}  // namespace testing_support
