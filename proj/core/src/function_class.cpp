#include "ipmdro/function_class.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "ipmdro/error.hpp"
#include "ipmdro/random.hpp"

namespace ipmdro {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void fill_eigen(QuadraticGeometry& g) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g.primal);
  g.primal_eigenvalues = eig.eigenvalues();
  g.primal_eigenvectors = eig.eigenvectors();
}

Matrix pseudo_inverse(const Matrix& symmetric, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetric);
  const Vector& values = eig.eigenvalues();
  const double threshold = cutoff * std::max(1.0, values.cwiseAbs().maxCoeff());
  Vector inverted = Vector::Zero(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) > threshold) inverted(i) = 1.0 / values(i);
  }
  return eig.eigenvectors() * inverted.asDiagonal() * eig.eigenvectors().transpose();
}

std::vector<std::vector<Eigen::Index>> components(Eigen::Index n,
                                                  const std::vector<std::pair<Eigen::Index, Eigen::Index>>& links) {
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  for (const auto& [a, b] : links) {
    const Eigen::Index ra = find(a);
    const Eigen::Index rb = find(b);
    if (ra != rb) parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
  }
  std::vector<std::vector<Eigen::Index>> blocks;
  std::vector<Eigen::Index> block_of(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index root = find(i);
    auto& slot = block_of[static_cast<std::size_t>(root)];
    if (slot < 0) {
      slot = static_cast<Eigen::Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[static_cast<std::size_t>(slot)].push_back(i);
  }
  return blocks;
}

double sup_norm(const Vector& h) { return h.size() == 0 ? 0.0 : h.cwiseAbs().maxCoeff(); }

double quadratic_norm(const QuadraticGeometry& g, const Vector& h) {
  return std::sqrt(std::max(0.0, h.dot(g.primal * h)));
}

}  // namespace

std::string_view to_string(ClassKind kind) noexcept {
  switch (kind) {
    case ClassKind::Explicit: return "explicit";
    case ClassKind::Lipschitz: return "lipschitz";
    case ClassKind::SupNorm: return "sup_norm";
    case ClassKind::Rkhs: return "rkhs";
    case ClassKind::Fisher: return "fisher";
    case ClassKind::Sobolev: return "sobolev";
    case ClassKind::Dudley: return "dudley";
    case ClassKind::Zeta: return "zeta";
  }
  return "unknown";
}

bool QuadraticGeometry::finite_distance(const Vector& difference, double tol) const {
  for (const auto& block : blocks) {
    double mass = 0.0;
    for (Eigen::Index i : block) mass += difference(i);
    if (std::abs(mass) > tol) return false;
  }
  return true;
}

FunctionClass FunctionClass::explicit_set(const std::vector<FunctionVec>& functions) {
  require(!functions.empty(), ErrorCode::InvalidArgument, "an explicit class needs at least one function");
  const SpacePtr& space = functions.front().space();
  Matrix members(space->dim(), static_cast<Eigen::Index>(functions.size()));
  for (std::size_t k = 0; k < functions.size(); ++k) {
    require_same_space(space, functions[k].space(), "explicit class");
    members.col(static_cast<Eigen::Index>(k)) = functions[k].values();
  }
  return FunctionClass(space, ExplicitSet{std::move(members)});
}

FunctionClass FunctionClass::explicit_set(SpacePtr space, Matrix members) {
  require(space != nullptr, ErrorCode::InvalidArgument, "explicit class needs a space");
  require(members.cols() >= 1, ErrorCode::InvalidArgument, "an explicit class needs at least one function");
  require(members.rows() == space->dim(), ErrorCode::DimensionMismatch,
          "explicit members must have one value per point");
  require(members.allFinite(), ErrorCode::NonFiniteValue, "explicit members must be finite");
  return FunctionClass(std::move(space), ExplicitSet{std::move(members)});
}

FunctionClass FunctionClass::lipschitz_ball(SpacePtr space) {
  require(space != nullptr, ErrorCode::InvalidArgument, "class needs a space");
  require(space->has_metric(), ErrorCode::MissingMetric, "the Lipschitz ball needs a metric");
  return FunctionClass(std::move(space), LipschitzBall{});
}

FunctionClass FunctionClass::sup_norm_ball(SpacePtr space) {
  require(space != nullptr, ErrorCode::InvalidArgument, "class needs a space");
  return FunctionClass(std::move(space), SupNormBall{});
}

FunctionClass FunctionClass::rkhs_ball(SpacePtr space, Matrix gram, const Tolerances& tol) {
  require(space != nullptr, ErrorCode::InvalidArgument, "class needs a space");
  const Eigen::Index n = space->dim();
  require(gram.rows() == n && gram.cols() == n, ErrorCode::DimensionMismatch,
          "Gram matrix must be n x n");
  require(gram.allFinite(), ErrorCode::NonFiniteValue, "Gram matrix must be finite");
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  require((gram - gram.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
          ErrorCode::SingularGram, "Gram matrix must be symmetric");
  gram = 0.5 * (gram + gram.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  require(eig.eigenvalues().minCoeff() > tol.gram_min_eigenvalue, ErrorCode::SingularGram,
          "Gram matrix must be positive definite");

  QuadraticGeometry g;
  Eigen::LLT<Matrix> llt(gram);
  g.primal = llt.solve(Matrix::Identity(n, n));
  g.primal = 0.5 * (g.primal + g.primal.transpose()).eval();
  g.dual = gram;
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  g.blocks.push_back(std::move(all));
  fill_eigen(g);
  return FunctionClass(std::move(space), RkhsBall{std::move(gram), std::move(g)});
}

FunctionClass FunctionClass::fisher_ball(const DiscreteDistribution& mu, bool allow_infinite,
                                         const Tolerances& /*tol*/) {
  require(allow_infinite || mu.has_full_support(), ErrorCode::ZeroMassMeasure,
          "the Fisher ball needs a fully supported mu (or the infinite-distance opt-in)");
  const Eigen::Index n = mu.dim();
  QuadraticGeometry g;
  g.primal = mu.weights().asDiagonal();
  g.dual = Matrix::Zero(n, n);
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (mu[i] > 0.0) {
      g.dual(i, i) = 1.0 / mu[i];
      support.push_back(i);
    } else {
      g.blocks.push_back({i});
    }
  }
  if (!support.empty()) g.blocks.insert(g.blocks.begin(), std::move(support));
  fill_eigen(g);
  return FunctionClass(mu.space(), FisherBall{mu, allow_infinite, std::move(g)});
}

FunctionClass FunctionClass::sobolev_ball(const DiscreteDistribution& mu, bool allow_infinite,
                                          const Tolerances& tol) {
  const SpacePtr& space = mu.space();
  require(space->has_graph(), ErrorCode::MissingGraph, "the Sobolev ball needs a graph");
  require(allow_infinite || mu.has_full_support(), ErrorCode::ZeroMassMeasure,
          "the Sobolev ball needs a fully supported mu (or the infinite-distance opt-in)");
  const Eigen::Index n = space->dim();
  Matrix laplacian = Matrix::Zero(n, n);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> links;
  for (const Edge& e : space->edges()) {
    const auto i = static_cast<Eigen::Index>(e.from);
    const auto j = static_cast<Eigen::Index>(e.to);
    // Point i sees neighbour j and point j sees neighbour i.
    const double w = (mu[i] + mu[j]) * e.weight;
    if (w <= 0.0) continue;
    laplacian(i, i) += w;
    laplacian(j, j) += w;
    laplacian(i, j) -= w;
    laplacian(j, i) -= w;
    links.emplace_back(i, j);
  }
  QuadraticGeometry g;
  g.blocks = components(n, links);
  require(allow_infinite || g.blocks.size() == 1, ErrorCode::DisconnectedGraph,
          "the Sobolev ball needs a connected graph (or the infinite-distance opt-in)");
  g.primal = laplacian;
  g.dual = pseudo_inverse(laplacian, tol.pinv_cutoff);
  fill_eigen(g);
  return FunctionClass(space, SobolevBall{mu, allow_infinite, std::move(laplacian), std::move(g)});
}

FunctionClass FunctionClass::dudley_ball(SpacePtr space) {
  require(space != nullptr, ErrorCode::InvalidArgument, "class needs a space");
  require(space->has_metric(), ErrorCode::MissingMetric, "the Dudley ball needs a metric");
  return FunctionClass(std::move(space), DudleyBall{});
}

FunctionClass FunctionClass::zeta_ball(SpacePtr space, ZetaFunction zeta, double degree, bool convex,
                                       std::uint64_t check_seed, const Tolerances& tol) {
  require(space != nullptr, ErrorCode::InvalidArgument, "class needs a space");
  require(static_cast<bool>(zeta), ErrorCode::InvalidArgument, "zeta evaluator is empty");
  require(std::isfinite(degree) && degree > 0.0, ErrorCode::InvalidArgument,
          "homogeneity degree must be positive");
  Rng rng(check_seed);
  for (int trial = 0; trial < tol.zeta_homogeneity_samples; ++trial) {
    const double a = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
    const Vector h = rng.normal_vector(space->dim());
    const double base = zeta(h);
    const double scaled = zeta(a * h);
    const double expected = std::pow(a, degree) * base;
    const double err = std::abs(scaled - expected);
    require(err <= tol.zeta_homogeneity * std::max(std::abs(expected), std::abs(scaled)),
            ErrorCode::NotHomogeneous,
            "zeta(a h) != a^k zeta(h) at trial " + std::to_string(trial));
  }
  return FunctionClass(std::move(space), ZetaBall{std::move(zeta), degree, convex});
}

ClassKind FunctionClass::kind() const noexcept {
  return static_cast<ClassKind>(variant_.index());
}

bool FunctionClass::is_polyhedral() const noexcept {
  const ClassKind k = kind();
  return k == ClassKind::Explicit || k == ClassKind::SupNorm || k == ClassKind::Lipschitz ||
         k == ClassKind::Dudley;
}

bool FunctionClass::is_quadratic() const noexcept {
  const ClassKind k = kind();
  return k == ClassKind::Rkhs || k == ClassKind::Fisher || k == ClassKind::Sobolev;
}

bool FunctionClass::is_even(double tol) const {
  if (kind() == ClassKind::Zeta) return false;
  if (kind() != ClassKind::Explicit) return true;
  const Matrix& f = members();
  for (Eigen::Index a = 0; a < f.cols(); ++a) {
    bool found = false;
    for (Eigen::Index b = 0; b < f.cols() && !found; ++b) {
      found = (f.col(a) + f.col(b)).cwiseAbs().maxCoeff() <= tol;
    }
    if (!found) return false;
  }
  return true;
}

const Matrix& FunctionClass::members() const {
  const auto* set = std::get_if<ExplicitSet>(&variant_);
  require(set != nullptr, ErrorCode::UnsupportedVariant, "class is not an explicit set");
  return set->members;
}

std::size_t FunctionClass::member_count() const { return static_cast<std::size_t>(members().cols()); }

FunctionVec FunctionClass::member(std::size_t index) const {
  const Matrix& f = members();
  require(index < static_cast<std::size_t>(f.cols()), ErrorCode::InvalidArgument, "member index out of range");
  return FunctionVec(space_, f.col(static_cast<Eigen::Index>(index)));
}

const QuadraticGeometry& FunctionClass::quadratic() const {
  return std::visit(
      Overloaded{[](const RkhsBall& b) -> const QuadraticGeometry& { return b.geometry; },
                 [](const FisherBall& b) -> const QuadraticGeometry& { return b.geometry; },
                 [](const SobolevBall& b) -> const QuadraticGeometry& { return b.geometry; },
                 [](const auto&) -> const QuadraticGeometry& {
                   raise(ErrorCode::UnsupportedVariant, "class has no quadratic geometry");
                 }},
      variant_);
}

const ZetaBall& FunctionClass::zeta() const {
  const auto* z = std::get_if<ZetaBall>(&variant_);
  require(z != nullptr, ErrorCode::UnsupportedVariant, "class is not a zeta ball");
  return *z;
}

double lipschitz_constant(const SampleSpace& space, const Vector& h) {
  const Matrix& c = space.metric();
  double best = 0.0;
  for (const auto& [i, j] : space.lipschitz_pairs()) {
    const auto a = static_cast<Eigen::Index>(i);
    const auto b = static_cast<Eigen::Index>(j);
    best = std::max(best, std::abs(h(a) - h(b)) / c(a, b));
  }
  return best;
}

double class_norm(const FunctionClass& cls, const Vector& h) {
  require(h.size() == cls.space()->dim(), ErrorCode::DimensionMismatch,
          "function dimension does not match the class space");
  return std::visit(
      Overloaded{
          [](const ExplicitSet&) -> double {
            raise(ErrorCode::UnsupportedVariant, "explicit sets have no closed-form norm");
          },
          [&](const LipschitzBall&) { return lipschitz_constant(*cls.space(), h); },
          [&](const SupNormBall&) { return sup_norm(h); },
          [&](const RkhsBall& b) { return quadratic_norm(b.geometry, h); },
          [&](const FisherBall& b) { return quadratic_norm(b.geometry, h); },
          [&](const SobolevBall& b) { return quadratic_norm(b.geometry, h); },
          [&](const DudleyBall&) { return sup_norm(h) + lipschitz_constant(*cls.space(), h); },
          [&](const ZetaBall& z) {
            const double value = z.zeta(h);
            require(value >= 0.0, ErrorCode::NegativeZeta, "zeta evaluator returned a negative value");
            return std::pow(value, 1.0 / z.degree);
          }},
      cls.variant());
}

SymmetrizeResult symmetrize_class(const FunctionClass& cls) {
  switch (cls.kind()) {
    case ClassKind::Explicit: break;
    case ClassKind::Zeta:
      raise(ErrorCode::UnsupportedVariant, "a zeta ball cannot be symmetrized explicitly");
    default:
      return {cls, true};
  }
  const Matrix& f = cls.members();
  std::vector<Vector> unique;
  auto add = [&](const Vector& v) {
    for (const Vector& u : unique) {
      if (u == v) return;
    }
    unique.push_back(v);
  };
  for (Eigen::Index k = 0; k < f.cols(); ++k) add(f.col(k));
  for (Eigen::Index k = 0; k < f.cols(); ++k) add(-f.col(k));
  Matrix out(f.rows(), static_cast<Eigen::Index>(unique.size()));
  for (std::size_t k = 0; k < unique.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = unique[k];
  const bool already_even = cls.is_even(0.0);
  return {FunctionClass::explicit_set(cls.space(), std::move(out)), already_even};
}

FunctionClass discretize_structured_class(const FunctionClass& cls, std::size_t budget,
                                          std::uint64_t seed) {
  require(cls.is_structured(), ErrorCode::InvalidArgument, "discretization needs a structured class");
  require(budget >= 2, ErrorCode::InvalidArgument, "discretization budget must be at least 2");
  const Eigen::Index n = cls.space()->dim();
  const auto m = static_cast<Eigen::Index>(budget);
  Matrix out(n, m);
  Eigen::Index filled = 0;
  auto push = [&](const Vector& v) {
    if (filled < m) out.col(filled++) = v;
  };

  if (cls.kind() == ClassKind::SupNorm && n < 31) {
    // Sign vectors are the extreme points of the sup-norm ball. The
    // non-constant ones come first, each followed by its negation, so that a
    // difference of probability vectors always finds sign(q - p) once the
    // prefix covers them.
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;
    auto sign_vector = [&](std::uint64_t mask) {
      Vector v(n);
      for (Eigen::Index i = 0; i < n; ++i) v(i) = (mask >> i) & 1U ? 1.0 : -1.0;
      return v;
    };
    for (std::uint64_t mask = 1; mask <= full / 2 && filled < m; ++mask) {
      push(sign_vector(mask));
      push(sign_vector(full ^ mask));
    }
    push(Vector::Ones(n));
    push(-Vector::Ones(n));
  }

  Rng rng(seed);
  const bool even = cls.kind() != ClassKind::Zeta;
  int stalls = 0;
  while (filled < m) {
    const Vector g = rng.normal_vector(n);
    const double norm = class_norm(cls, g);
    if (!(norm > 1e-300) || !std::isfinite(norm)) {
      require(++stalls < 1000, ErrorCode::NumericalBreakdown,
              "could not sample a function with nonzero class norm");
      continue;
    }
    const Vector f = g / norm;
    push(f);
    if (even) push(-f);
  }
  return FunctionClass::explicit_set(cls.space(), std::move(out));
}

}  // namespace ipmdro
