#include <benchmark/benchmark.h>

#include <cmath>
#include <string>
#include <vector>

#include "ipmdro/dro.hpp"
#include "ipmdro/ipm.hpp"
#include "ipmdro/penalties.hpp"
#include "ipmdro/random.hpp"
#include "ipmdro/solvers.hpp"

using namespace ipmdro;

namespace {

std::vector<std::string> labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("w" + std::to_string(i));
  return out;
}

struct SinProblem {
  SpacePtr grid;
  DiscreteDistribution p;
  FunctionVec h;
};

SinProblem sin_problem(int points) {
  std::vector<double> t;
  for (int i = 0; i < points; ++i) t.push_back(-4.0 + 8.0 * i / (points - 1));
  auto grid = SampleSpace::line_grid(t);
  Vector values(grid->dim()), w(grid->dim());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double x = t[static_cast<std::size_t>(i)];
    values(i) = std::sin(2 * x) + x;
    w(i) = std::exp(-0.5 * x * x);
  }
  return {grid, DiscreteDistribution::normalized(grid, w), FunctionVec(grid, values)};
}

void BM_LambdaLipschitzSin(benchmark::State& state) {
  const auto prob = sin_problem(static_cast<int>(state.range(0)));
  const auto lip = FunctionClass::lipschitz_ball(prob.grid);
  for (auto _ : state) benchmark::DoNotOptimize(lambda_penalty(prob.p, lip, 1.0, prob.h).value);
}
BENCHMARK(BM_LambdaLipschitzSin)->Arg(51)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);

void BM_WorstCaseLipschitzSin(benchmark::State& state) {
  const auto prob = sin_problem(static_cast<int>(state.range(0)));
  const auto lip = FunctionClass::lipschitz_ball(prob.grid);
  for (auto _ : state) benchmark::DoNotOptimize(worst_case_expectation(prob.p, lip, 1.0, prob.h).value);
}
BENCHMARK(BM_WorstCaseLipschitzSin)->Arg(51)->Arg(201)->Unit(benchmark::kMillisecond);

void BM_WorstCaseExplicit(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Rng rng(7);
  auto space = SampleSpace::make(labels(static_cast<std::size_t>(n)));
  Matrix members(n, 2 * n + 12);
  for (Eigen::Index k = 0; k < 6; ++k) {
    const Vector f = rng.normal_vector(n);
    members.col(2 * k) = f;
    members.col(2 * k + 1) = -f;
  }
  members.rightCols(2 * n) << Matrix::Identity(n, n), -Matrix::Identity(n, n);
  const auto cls = FunctionClass::explicit_set(space, members);
  const auto p = DiscreteDistribution::normalized(space, rng.simplex_point(n));
  const FunctionVec h(space, rng.normal_vector(n));
  for (auto _ : state) benchmark::DoNotOptimize(worst_case_expectation(p, cls, 0.5, h).value);
}
BENCHMARK(BM_WorstCaseExplicit)->Arg(8)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_WorstCaseFisher(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Rng rng(8);
  auto space = SampleSpace::make(labels(static_cast<std::size_t>(n)));
  const auto mu = DiscreteDistribution::normalized(space, rng.simplex_point(n).array() + 0.05);
  const auto cls = FunctionClass::fisher_ball(mu);
  const auto p = DiscreteDistribution::normalized(space, rng.simplex_point(n).array() + 0.02);
  const FunctionVec h(space, rng.normal_vector(n));
  for (auto _ : state) benchmark::DoNotOptimize(worst_case_expectation(p, cls, 0.4, h).value);
}
BENCHMARK(BM_WorstCaseFisher)->Arg(6)->Arg(24)->Unit(benchmark::kMillisecond);

void BM_ConcaveQuadratic(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Rng rng(9);
  Matrix a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) a.col(j) = rng.normal_vector(n);
  const Matrix q = -(a * a.transpose()) / static_cast<double>(n);
  const Vector c = rng.normal_vector(n);
  for (auto _ : state) benchmark::DoNotOptimize(maximize_concave_quadratic_over_simplex(q, c, 1e-10).value);
}
BENCHMARK(BM_ConcaveQuadratic)->Arg(8)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_TransportGeneralMetric(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Rng rng(10);
  Matrix xy(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) xy.row(i) << rng.uniform(), rng.uniform();
  Matrix c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = (xy.row(i) - xy.row(j)).norm();
  auto space = SampleSpace::make(labels(static_cast<std::size_t>(n)), c);
  const Vector q = rng.simplex_point(n);
  const Vector p = rng.simplex_point(n);
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein1(*space, q, p).value);
}
BENCHMARK(BM_TransportGeneralMetric)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
