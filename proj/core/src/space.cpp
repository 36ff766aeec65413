#include "ipmdro/space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ipmdro/error.hpp"

namespace ipmdro {
namespace {

std::string pair_text(Eigen::Index i, Eigen::Index j) {
  std::ostringstream os;
  os << "(" << i << ", " << j << ")";
  return os.str();
}

void validate_metric(Matrix& metric, const Tolerances& tol) {
  const Eigen::Index n = metric.rows();
  require(metric.cols() == n, ErrorCode::DimensionMismatch, "metric must be square");
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      require(std::isfinite(metric(i, j)), ErrorCode::NonFiniteValue,
              "metric entry " + pair_text(i, j) + " is not finite");
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    require(std::abs(metric(i, i)) <= tol.metric_triangle, ErrorCode::NonPositiveMetric,
            "metric diagonal entry " + std::to_string(i) + " is not zero");
    metric(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      require(std::abs(metric(i, j) - metric(j, i)) <= tol.metric_triangle,
              ErrorCode::AsymmetricMetric, "metric is not symmetric at " + pair_text(i, j));
      require(metric(i, j) > 0.0, ErrorCode::NonPositiveMetric,
              "metric entry " + pair_text(i, j) + " must be strictly positive");
      const double mean = 0.5 * (metric(i, j) + metric(j, i));
      metric(i, j) = mean;
      metric(j, i) = mean;
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double cik = metric(i, k);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (metric(i, j) > cik + metric(k, j) + tol.metric_triangle) {
          raise(ErrorCode::TriangleInequalityViolated,
                "c" + pair_text(i, j) + " exceeds the path through point " + std::to_string(k));
        }
      }
    }
  }
}

// Returns the points sorted along the line if the metric is isometric to a
// subset of the real line, otherwise an empty vector.
std::vector<std::size_t> detect_line(const Matrix& metric) {
  const Eigen::Index n = metric.rows();
  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (n <= 2) return order;

  Eigen::Index end = 0;
  metric.row(0).maxCoeff(&end);
  const Vector coord = metric.row(end).transpose();
  const double scale = 1.0 + metric.maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(metric(i, j) - std::abs(coord(i) - coord(j))) > 1e-12 * scale) return {};
    }
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return coord(static_cast<Eigen::Index>(a)) < coord(static_cast<Eigen::Index>(b));
  });
  return order;
}

}  // namespace

SpacePtr SampleSpace::make(std::vector<std::string> labels, std::optional<Matrix> metric,
                           std::optional<std::vector<Edge>> graph, const Tolerances& tol) {
  require(!labels.empty(), ErrorCode::InvalidArgument, "a sample space needs at least one point");
  const auto n = labels.size();

  std::shared_ptr<SampleSpace> space(new SampleSpace());
  if (metric) {
    require(static_cast<std::size_t>(metric->rows()) == n, ErrorCode::DimensionMismatch,
            "metric has " + std::to_string(metric->rows()) + " rows for " + std::to_string(n) +
                " points");
    validate_metric(*metric, tol);
    space->line_order_ = detect_line(*metric);
    if (space->is_line_metric()) {
      for (std::size_t k = 0; k + 1 < n; ++k) {
        space->lipschitz_pairs_.emplace_back(space->line_order_[k], space->line_order_[k + 1]);
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) space->lipschitz_pairs_.emplace_back(i, j);
      }
    }
  }
  if (graph) {
    for (const Edge& e : *graph) {
      require(e.from < n && e.to < n, ErrorCode::InvalidEdge,
              "edge " + pair_text(static_cast<Eigen::Index>(e.from), static_cast<Eigen::Index>(e.to)) +
                  " references a missing point");
      require(e.from != e.to, ErrorCode::SelfLoop,
              "self-loop at point " + std::to_string(e.from));
      require(std::isfinite(e.weight) && e.weight > 0.0, ErrorCode::InvalidEdge,
              "edge weights must be finite and positive");
    }
  }
  space->labels_ = std::move(labels);
  space->metric_ = std::move(metric);
  space->graph_ = std::move(graph);
  return space;
}

SpacePtr SampleSpace::line_grid(const std::vector<double>& coordinates) {
  const auto n = static_cast<Eigen::Index>(coordinates.size());
  std::vector<std::string> labels;
  labels.reserve(coordinates.size());
  Matrix metric(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    std::ostringstream os;
    os.precision(17);
    os << coordinates[static_cast<std::size_t>(i)];
    labels.push_back(os.str());
    for (Eigen::Index j = 0; j < n; ++j) {
      metric(i, j) = std::abs(coordinates[static_cast<std::size_t>(i)] -
                              coordinates[static_cast<std::size_t>(j)]);
    }
  }
  return make(std::move(labels), std::move(metric));
}

const Matrix& SampleSpace::metric() const {
  require(metric_.has_value(), ErrorCode::MissingMetric, "the sample space carries no metric");
  return *metric_;
}

const std::vector<Edge>& SampleSpace::edges() const {
  require(graph_.has_value(), ErrorCode::MissingGraph, "the sample space carries no graph");
  return *graph_;
}

const std::vector<std::pair<std::size_t, std::size_t>>& SampleSpace::lipschitz_pairs() const {
  require(metric_.has_value(), ErrorCode::MissingMetric, "the sample space carries no metric");
  return lipschitz_pairs_;
}

DiscreteDistribution DiscreteDistribution::make(SpacePtr space, Vector weights,
                                                const Tolerances& tol) {
  require(space != nullptr, ErrorCode::InvalidArgument, "distribution needs a space");
  require(weights.size() == space->dim(), ErrorCode::DimensionMismatch,
          "distribution has " + std::to_string(weights.size()) + " weights for " +
              std::to_string(space->size()) + " points");
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    require(std::isfinite(weights(i)), ErrorCode::NonFiniteValue,
            "weight " + std::to_string(i) + " is not finite");
    require(weights(i) >= 0.0, ErrorCode::InvalidDistribution,
            "weight " + std::to_string(i) + " is negative");
  }
  require(std::abs(weights.sum() - 1.0) <= tol.distribution_sum, ErrorCode::InvalidDistribution,
          "weights must sum to one");
  return DiscreteDistribution(std::move(space), std::move(weights));
}

DiscreteDistribution DiscreteDistribution::normalized(SpacePtr space, const Vector& weights) {
  require(space != nullptr, ErrorCode::InvalidArgument, "distribution needs a space");
  require(weights.size() == space->dim(), ErrorCode::DimensionMismatch,
          "distribution dimension does not match the space");
  Vector w = weights.cwiseMax(0.0);
  const double total = w.sum();
  require(std::isfinite(total) && total > 0.0, ErrorCode::InvalidDistribution,
          "weights have no positive mass");
  w /= total;
  return DiscreteDistribution(std::move(space), std::move(w));
}

DiscreteDistribution DiscreteDistribution::uniform(SpacePtr space) {
  const Eigen::Index n = space->dim();
  return DiscreteDistribution(std::move(space), Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

DiscreteDistribution DiscreteDistribution::point_mass(SpacePtr space, std::size_t index) {
  require(index < space->size(), ErrorCode::InvalidArgument, "point index out of range");
  Vector w = Vector::Zero(space->dim());
  w(static_cast<Eigen::Index>(index)) = 1.0;
  return DiscreteDistribution(std::move(space), std::move(w));
}

FunctionVec::FunctionVec(SpacePtr space, Vector values)
    : space_(std::move(space)), values_(std::move(values)) {
  require(space_ != nullptr, ErrorCode::InvalidArgument, "function needs a space");
  require(values_.size() == space_->dim(), ErrorCode::DimensionMismatch,
          "function has " + std::to_string(values_.size()) + " values for " +
              std::to_string(space_->size()) + " points");
  require(values_.allFinite(), ErrorCode::NonFiniteValue, "function values must be finite");
}

FunctionVec FunctionVec::constant(SpacePtr space, double value) {
  const Eigen::Index n = space->dim();
  return FunctionVec(std::move(space), Vector::Constant(n, value));
}

FunctionVec FunctionVec::operator-() const { return FunctionVec(space_, -values_); }

FunctionVec operator+(const FunctionVec& a, const FunctionVec& b) {
  require_same_space(a.space_, b.space_, "function addition");
  return FunctionVec(a.space_, a.values_ + b.values_);
}

FunctionVec operator-(const FunctionVec& a, const FunctionVec& b) {
  require_same_space(a.space_, b.space_, "function subtraction");
  return FunctionVec(a.space_, a.values_ - b.values_);
}

FunctionVec operator*(double scale, const FunctionVec& f) {
  return FunctionVec(f.space_, scale * f.values_);
}

FunctionVec FunctionVec::shifted(double offset) const {
  return FunctionVec(space_, values_.array() + offset);
}

double expectation(const DiscreteDistribution& p, const FunctionVec& h) {
  require_same_space(p.space(), h.space(), "expectation");
  return p.weights().dot(h.values());
}

void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* context) {
  if (a == b) return;
  require(a && b && a->labels() == b->labels(), ErrorCode::SpaceMismatch,
          std::string(context) + ": operands live on different spaces");
}

}  // namespace ipmdro
