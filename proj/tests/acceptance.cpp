// Runs the twelve acceptance checks and prints one PASS/FAIL line per check.
// Exits nonzero when any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "ipmdro/critic.hpp"
#include "ipmdro/dro.hpp"
#include "ipmdro/gan.hpp"
#include "ipmdro/ipm.hpp"
#include "ipmdro/penalties.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace ipmdro;
namespace ts = testing_support;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Instance {
  DiscreteDistribution p;
  FunctionClass cls;
  double eps;
  FunctionVec h;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, pattern, a, b, c);
  return buffer;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Instances from the first three checks, reused by the bound check and the grid cross-check.
std::vector<Instance> g_explicit;
std::vector<Instance> g_quadratic;
std::vector<Instance> g_tv;

Outcome identity_exact() {
  Rng rng(1001);
  const auto start = Clock::now();
  double worst = 0.0;
  bool all_exact = true;
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = 3 + rng.index(6);
    auto space = ts::plain_space(n);
    auto cls = ts::random_even_explicit(space, 2 + rng.index(5), rng);
    auto p = ts::random_distribution(space, rng);
    const double eps = rng.uniform(0.05, 2.0);
    const FunctionVec h(space, rng.normal_vector(space->dim()));
    const auto rep = verify_identity(p, cls, eps, h);
    worst = std::max(worst, rep.residual);
    all_exact = all_exact && rep.exact;
    g_explicit.push_back({p, cls, eps, h});
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-6 && all_exact && elapsed < 30.0,
          fmt("200 instances, max residual %.3g, %.2f s", worst, elapsed)};
}

Outcome identity_quadratic() {
  Rng rng(1002);
  double worst_residual = 0.0;
  double worst_gap = 0.0;
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = 3 + rng.index(4);
    const auto dim = static_cast<Eigen::Index>(n);
    FunctionClass cls = [&] {
      switch (k % 3) {
        case 0: return FunctionClass::fisher_ball(ts::random_distribution(ts::plain_space(n), rng, 0.05));
        case 1: return FunctionClass::rkhs_ball(ts::plain_space(n), ts::random_gram(dim, rng));
        default: return FunctionClass::sobolev_ball(ts::random_distribution(ts::graph_space(n, rng), rng, 0.05));
      }
    }();
    auto p = ts::random_distribution(cls.space(), rng, 0.02);
    const double eps = rng.uniform(0.05, 1.0);
    const FunctionVec h(cls.space(), rng.normal_vector(dim));
    const auto rep = verify_identity(p, cls, eps, h);
    worst_residual = std::max(worst_residual, rep.residual);
    worst_gap = std::max({worst_gap, rep.lhs_gap, rep.lambda_gap});
    g_quadratic.push_back({p, cls, eps, h});
  }
  return {worst_residual <= 5e-4 && worst_gap <= 5e-4,
          fmt("50 fisher/mmd/sobolev instances, max residual %.3g, max gap %.3g", worst_residual, worst_gap)};
}

Outcome tv_example() {
  auto space = ts::plain_space(3);
  auto p = DiscreteDistribution::uniform(space);
  auto sup = FunctionClass::sup_norm_ball(space);
  const FunctionVec h(space, (Vector(3) << 0.0, 1.0, 2.0).finished());
  const double at_03 = worst_case_expectation(p, sup, 0.3, h).value;
  const double at_10 = worst_case_expectation(p, sup, 1.0, h).value;
  double worst = std::max(std::abs(at_03 - 1.3), std::abs(at_10 - 11.0 / 6.0));
  double oracle_gap = 0.0;
  for (int k = 1; k <= 40; ++k) {
    const double eps = 0.05 * k;
    const double value = worst_case_expectation(p, sup, eps, h).value;
    const double curve = std::min({1.0 + eps, 4.0 / 3.0 + eps / 2.0, 2.0});
    worst = std::max(worst, std::abs(value - curve));
    oracle_gap = std::max(oracle_gap, std::abs(value - oracle::greedy_l1_worst_case(p.weights(), h.values(), eps)));
    g_tv.push_back({p, sup, eps, h});
  }
  return {worst <= 1e-6 && oracle_gap <= 1e-6,
          fmt("values %.12g and %.12g, max curve deviation %.3g", at_03, at_10, worst)};
}

Outcome sin_example() {
  std::vector<double> t;
  for (int i = 0; i <= 200; ++i) t.push_back(-4.0 + 0.04 * i);
  auto grid = SampleSpace::line_grid(t);
  Vector values(grid->dim()), w(grid->dim());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double x = t[static_cast<std::size_t>(i)];
    values(i) = std::sin(2 * x) + x;
    w(i) = std::exp(-0.5 * x * x);
  }
  auto p = DiscreteDistribution::normalized(grid, w);
  auto lip = FunctionClass::lipschitz_ball(grid);
  const FunctionVec h(grid, values);
  const double eps_lip = theta(lip, h).value;
  const double lambda = lambda_penalty(p, lip, 1.0, h).value;
  const bool pass = eps_lip >= 2.95 && eps_lip <= 3.0 && lambda <= 2.001 && eps_lip - lambda >= 0.9;
  return {pass, fmt("eps*Lip %.6f, Lambda %.6f, gap %.6f", eps_lip, lambda, eps_lip - lambda)};
}

Outcome centered_fisher() {
  Rng rng(1005);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    auto space = ts::plain_space(2 + rng.index(9));
    auto mu = ts::random_distribution(space, rng, 0.01);
    const Vector v = 3.0 * rng.normal_vector(space->dim());
    const double mean = mu.weights().dot(v);
    const double var = mu.weights().dot((v.array() - mean).square().matrix());
    const double value = centered_theta(FunctionClass::fisher_ball(mu), FunctionVec(space, v)).penalty.value;
    worst = std::max(worst, std::abs(value - std::sqrt(var)));
  }
  return {worst <= 1e-9, fmt("100 instances, max deviation %.3g", worst)};
}

Outcome centered_bound_slack() {
  double worst = std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  for (const auto* set : {&g_explicit, &g_quadratic, &g_tv}) {
    for (const auto& inst : *set) {
      worst = std::min(worst, corollary_bound(inst.p, inst.cls, inst.eps, inst.h).slack);
      ++count;
    }
  }
  auto space = ts::plain_space(3);
  const auto tight = corollary_bound(DiscreteDistribution::uniform(space), FunctionClass::sup_norm_ball(space), 0.3,
                                     FunctionVec(space, (Vector(3) << 0.0, 1.0, 2.0).finished()));
  return {worst >= -1e-7 && tight.equality,
          fmt("%.0f instances, min slack %.3g, tv slack at 0.3 %.3g", static_cast<double>(count), worst, tight.slack)};
}

Outcome lambda_properties() {
  Rng rng(1007);
  auto space = ts::plain_space(5);
  auto cls = ts::random_even_explicit(space, 3, rng);
  auto p = ts::random_distribution(space, rng, 0.02);
  const auto rep = tightness_report(p, cls, 0.5, 200, 1007);
  auto sup = FunctionClass::sup_norm_ball(space);
  const auto rep_sup = tightness_report(p, sup, 0.8, 200, 1008);
  const double bound = std::max(rep.max_bound_violation, rep_sup.max_bound_violation);
  const double sub = std::max(rep.max_subadditivity_violation, rep_sup.max_subadditivity_violation);
  return {bound <= 1e-8 && sub <= 1e-8, fmt("400 pairs, max bound violation %.3g, max subadditivity violation %.3g",
                                            bound, sub)};
}

Outcome alignment_both_directions() {
  Rng rng(1008);
  int aligned_ok = 0;
  int misaligned_ok = 0;
  double worst_aligned = 0.0;
  double smallest_gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 50; ++k) {
    auto space = ts::plain_space(3 + rng.index(4));
    auto cls = ts::random_even_explicit(space, 1 + rng.index(4), rng);
    auto p = ts::random_distribution(space, rng, 0.05);
    const auto inst = make_aligned_instance(cls, p, rng);
    const auto rep = check_alignment(inst.p, cls, inst.eps, inst.h);
    const double diff = std::abs(rep.lambda_value - rep.eps_theta);
    worst_aligned = std::max(worst_aligned, diff);
    if (rep.aligned && diff <= 1e-6 && rep.witness_mu && rep.witness_ball_violation <= 1e-7 &&
        rep.witness_residual <= 1e-6)
      ++aligned_ok;

    const FunctionVec shifted = inst.h.shifted(2.0 + 2.0 * inst.h.values().cwiseAbs().maxCoeff());
    const auto off = check_alignment(inst.p, cls, inst.eps, shifted);
    const double witness = witness_lp_value(inst.p, cls, inst.eps, shifted);
    smallest_gap = std::min(smallest_gap, off.gap);
    if (!off.aligned && off.gap > 1e-4 && witness < off.eps_theta - 1e-6) ++misaligned_ok;
  }
  return {aligned_ok == 50 && misaligned_ok == 50,
          fmt("aligned %.0f/50 (max |Lambda - eps Theta| %.3g), misaligned %.0f/50", aligned_ok, worst_aligned,
              misaligned_ok) +
              fmt(" (min gap %.3g)", smallest_gap)};
}

Outcome two_sided() {
  Rng rng(1009);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    auto space = ts::plain_space(3 + rng.index(4));
    auto cls = ts::random_even_explicit(space, 1 + rng.index(4), rng);
    auto p = ts::random_distribution(space, rng, 0.05);
    const auto inst = make_aligned_instance(cls, p, rng);
    const auto rep = two_sided_check(inst.p, inst.mu, cls, inst.eps, inst.h);
    worst = std::max({worst, rep.sup_residual, rep.inf_residual});
  }
  return {worst <= 1e-6, fmt("50 instances, max residual %.3g", worst)};
}

Outcome gan_bound() {
  Rng rng(1010);
  const std::vector<std::string> names{"kl", "js_gan", "tv", "ipm_indicator"};
  double worst_slack = std::numeric_limits<double>::infinity();
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 3 + rng.index(4);
    auto space = ts::plain_space(n);
    const auto dim = static_cast<Eigen::Index>(n);
    auto disc = FunctionClass::explicit_set(space, ts::random_matrix(dim, 1 + static_cast<Eigen::Index>(rng.index(5)),
                                                                     rng, -0.9, 0.6));
    auto p = ts::random_distribution(space, rng, 0.02);
    auto mu = ts::random_distribution(space, rng, 0.02);
    const double eps = rng.uniform(0.05, 1.5);
    const auto div = f_divergence_catalog(names[static_cast<std::size_t>(k) % names.size()]);
    auto cls = ts::random_even_explicit(space, 2, rng);
    worst_slack = std::min(worst_slack, gan_bound_check(div, disc, cls, eps, mu, p).slack);
    const auto own = gan_bound_check(div, disc, symmetrize_class(disc).cls, eps, mu, p);
    worst_slack = std::min(worst_slack, own.slack);
    worst_excess = std::max(worst_excess, own.robust - own.plain - eps);
  }
  return {worst_slack >= -1e-7 && worst_excess <= 1e-7,
          fmt("100 instances, min slack %.3g, max robust - plain - eps %.3g", worst_slack, worst_excess)};
}

Outcome hull_invariance() {
  Rng rng(1011);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 3 + rng.index(5);
    auto space = ts::plain_space(n);
    const auto dim = static_cast<Eigen::Index>(n);
    const auto m = 2 + static_cast<Eigen::Index>(rng.index(5));
    const Matrix base = ts::random_matrix(dim, m, rng);
    Matrix extended(dim, m + 50);
    extended.leftCols(m) = base;
    for (Eigen::Index j = 0; j < 50; ++j) extended.col(m + j) = base * rng.simplex_point(m);
    auto q = ts::random_distribution(space, rng);
    auto p = ts::random_distribution(space, rng);
    const double a = ipm_distance(FunctionClass::explicit_set(space, base), q, p).value;
    const double b = ipm_distance(FunctionClass::explicit_set(space, extended), q, p).value;
    worst = std::max(worst, std::abs(a - b));
  }
  return {worst <= 1e-10, fmt("100 pairs, max change %.3g", worst)};
}

/// Membership test of the radius-eps ball written from the class definition.
std::function<bool(const Vector&)> ball_filter(const Instance& inst) {
  const Vector p = inst.p.weights();
  const double eps = inst.eps;
  const double slack = 1e-12;
  const auto& cls = inst.cls;
  switch (cls.kind()) {
    case ClassKind::Explicit: {
      const Matrix f = cls.members();
      return [=](const Vector& q) { return (f.transpose() * (q - p)).maxCoeff() <= eps + slack; };
    }
    case ClassKind::SupNorm:
      return [=](const Vector& q) { return (q - p).cwiseAbs().sum() <= eps + slack; };
    case ClassKind::Lipschitz: {
      const Matrix c = cls.space()->metric();
      const std::vector<double> t{0.0, c(0, 1), c(0, 2)};
      return [=](const Vector& q) { return oracle::line_w1(t, q, p) <= eps + slack; };
    }
    case ClassKind::Fisher: {
      const Vector mu = std::get<FisherBall>(cls.variant()).mu.weights();
      return [=](const Vector& q) { return ((q - p).array().square() / mu.array()).sum() <= eps * eps + slack; };
    }
    case ClassKind::Rkhs: {
      const Matrix k = std::get<RkhsBall>(cls.variant()).gram;
      return [=](const Vector& q) { return (q - p).dot(k * (q - p)) <= eps * eps + slack; };
    }
    case ClassKind::Sobolev: {
      const Vector mu = std::get<SobolevBall>(cls.variant()).mu.weights();
      const Matrix lplus = oracle::pseudo_inverse(oracle::weighted_laplacian(mu, ts::edge_tuples(*cls.space())));
      return [=](const Vector& q) { return (q - p).dot(lplus * (q - p)) <= eps * eps + slack; };
    }
    default:
      return [](const Vector&) { return false; };
  }
}

Outcome grid_cross_check() {
  std::vector<Instance> three;
  for (const auto* set : {&g_explicit, &g_quadratic})
    for (const auto& inst : *set)
      if (inst.p.dim() == 3) three.push_back(inst);
  three.push_back(g_tv[5]);   // eps = 0.3
  three.push_back(g_tv[19]);  // eps = 1.0
  // Grid resolution error grows like step * (max h - min h); these extra
  // instances keep h in [-1, 1].
  Rng rng(1012);
  auto path = SampleSpace::line_grid({0.0, 0.7, 2.0});
  for (int k = 0; k < 4; ++k) {
    three.push_back({ts::random_distribution(path, rng, 0.05), FunctionClass::lipschitz_ball(path),
                     rng.uniform(0.1, 1.0), FunctionVec(path, rng.uniform_vector(3, -1.0, 1.0))});
  }
  double worst = 0.0;
  for (const auto& inst : three) {
    const double value = worst_case_expectation(inst.p, inst.cls, inst.eps, inst.h).value;
    const double grid = oracle::simplex_grid_max_3(inst.h.values(), ball_filter(inst));
    worst = std::max(worst, std::abs(value - grid));
    if (std::getenv("IPMDRO_ACCEPTANCE_VERBOSE"))
      std::printf("  %s eps %.4f value %.9f grid %.9f\n", std::string(inst.cls.name()).c_str(), inst.eps, value, grid);
  }
  return {worst <= 2e-3 && three.size() >= 10,
          fmt("%.0f three-point instances, max deviation from the grid %.3g", static_cast<double>(three.size()), worst)};
}

}  // namespace

int main() {
  struct Check {
    const char* name;
    Outcome (*run)();
  };
  const Check checks[] = {
      {"identity on explicit classes", identity_exact},
      {"identity on quadratic classes", identity_quadratic},
      {"total-variation worked example", tv_example},
      {"sine example on the 201-point grid", sin_example},
      {"centered fisher penalty equals the standard deviation", centered_fisher},
      {"centered bound slack", centered_bound_slack},
      {"penalty minorant and subadditivity", lambda_properties},
      {"alignment sufficiency and necessity", alignment_both_directions},
      {"two-sided robustness displays", two_sided},
      {"robust gan bound", gan_bound},
      {"convex-hull invariance of the distance", hull_invariance},
      {"three-point grid enumeration", grid_cross_check},
  };
  int failures = 0;
  int index = 1;
  const auto start = Clock::now();
  for (const auto& check : checks) {
    Outcome outcome;
    try {
      outcome = check.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2d %s: %s\n", outcome.pass ? "PASS" : "FAIL", index++, check.name, outcome.detail.c_str());
    std::fflush(stdout);
    failures += outcome.pass ? 0 : 1;
  }
  std::printf("%d of 12 criteria passed in %.1f s\n", 12 - failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
