#include <doctest.h>

#include <cmath>

#include "ipmdro/error.hpp"
#include "ipmdro/penalties.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace ipmdro;
namespace ts = testing_support;

namespace {

Vector vec3(double a, double b, double c) { return (Vector(3) << a, b, c).finished(); }

FunctionClass cross_polytope(const SpacePtr& space) {
  const Eigen::Index n = space->dim();
  Matrix m(n, 2 * n);
  m << Matrix::Identity(n, n), -Matrix::Identity(n, n);
  return FunctionClass::explicit_set(space, m);
}

SpacePtr sin_grid() {
  std::vector<double> t;
  for (int i = 0; i <= 200; ++i) t.push_back(-4.0 + 0.04 * i);
  return SampleSpace::line_grid(t);
}

/// One instance of every class that has a gauge, on n points.
std::vector<FunctionClass> gauge_fleet(std::size_t n, Rng& rng) {
  auto plain = ts::plain_space(n);
  auto metric = ts::planar_space(n, rng);
  auto graph = ts::graph_space(n, rng);
  return {ts::random_even_explicit(plain, 3, rng),
          FunctionClass::sup_norm_ball(plain),
          FunctionClass::lipschitz_ball(metric),
          FunctionClass::dudley_ball(metric),
          FunctionClass::fisher_ball(ts::random_distribution(plain, rng, 0.05)),
          FunctionClass::rkhs_ball(plain, ts::random_gram(static_cast<Eigen::Index>(n), rng)),
          FunctionClass::sobolev_ball(ts::random_distribution(graph, rng, 0.05))};
}

}  // namespace

TEST_SUITE("penalties") {
  TEST_CASE("explicit gauge") {
    auto space = ts::plain_space(3);
    auto cross = cross_polytope(space);
    const auto g = gauge_explicit(cross, FunctionVec(space, vec3(1, -1, 0)));
    CHECK(g.value == doctest::Approx(2.0).epsilon(1e-12));
    REQUIRE(g.weights.has_value());
    CHECK(g.weights->sum() == doctest::Approx(g.value).epsilon(1e-7));
    CHECK((cross.members() * *g.weights - vec3(1, -1, 0)).norm() <= 1e-7);
    CHECK(gauge_explicit(cross, FunctionVec::zero(space)).value == 0.0);

    auto ray = FunctionClass::explicit_set({FunctionVec(space, vec3(1, 0, 0))});
    CHECK(std::isinf(gauge_explicit(ray, FunctionVec(space, vec3(0, 1, 0))).value));

    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
      const auto n = 2 + rng.index(4);
      auto s = ts::plain_space(n);
      const Vector h = rng.normal_vector(s->dim());
      CHECK(gauge_explicit(cross_polytope(s), FunctionVec(s, h)).value ==
            doctest::Approx(oracle::sign_vector_l1(h)).epsilon(1e-9));
    }
  }

  TEST_CASE("closed-form gauges") {
    auto path = ts::path_space(3);
    const FunctionVec h(path, vec3(0, 1, 2));
    CHECK(theta(FunctionClass::sup_norm_ball(path), h).value == 2.0);
    CHECK(theta(FunctionClass::fisher_ball(DiscreteDistribution::uniform(path)), h).value ==
          doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-12));

    auto grid = sin_grid();
    Vector values(grid->dim());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      const double t = -4.0 + 0.04 * static_cast<double>(i);
      values(i) = std::sin(2 * t) + t;
    }
    const double lip = theta(FunctionClass::lipschitz_ball(grid), FunctionVec(grid, values)).value;
    CHECK(lip > 2.99);
    CHECK(lip < 3.0);

    Rng rng(22);
    auto gspace = ts::graph_space(5, rng);
    auto mu = ts::random_distribution(gspace, rng, 0.05);
    const Vector g = rng.normal_vector(5);
    const double energy = oracle::sobolev_energy(mu.weights(), ts::edge_tuples(*gspace), g);
    CHECK(theta(FunctionClass::sobolev_ball(mu), FunctionVec(gspace, g)).value ==
          doctest::Approx(std::sqrt(energy)).epsilon(1e-10));

    auto plain = ts::plain_space(4);
    const Matrix k = ts::random_gram(4, rng);
    const Vector f = rng.normal_vector(4);
    CHECK(theta(FunctionClass::rkhs_ball(plain, k), FunctionVec(plain, f)).value ==
          doctest::Approx(std::sqrt(f.dot(oracle::pseudo_inverse(k) * f))).epsilon(1e-8));
  }

  TEST_CASE("zeta gauges") {
    Rng rng(23);
    auto path = ts::path_space(4);
    auto mu = ts::random_distribution(path, rng, 0.05);
    const Vector w = mu.weights();
    auto fisher_zeta = FunctionClass::zeta_ball(path, [w](const Vector& h) { return w.dot(h.cwiseProduct(h)); },
                                                2.0, true);
    auto dudley_zeta = FunctionClass::zeta_ball(
        path, [path](const Vector& h) { return h.cwiseAbs().maxCoeff() + lipschitz_constant(*path, h); }, 1.0,
        true);
    for (int trial = 0; trial < 20; ++trial) {
      const FunctionVec h(path, rng.normal_vector(4));
      CHECK(theta(fisher_zeta, h).value ==
            doctest::Approx(theta(FunctionClass::fisher_ball(mu), h).value).epsilon(1e-12));
      CHECK(theta(dudley_zeta, h).value ==
            doctest::Approx(theta(FunctionClass::dudley_ball(path), h).value).epsilon(1e-12));
    }
    CHECK(theta(fisher_zeta, FunctionVec::zero(path)).value == 0.0);

    auto nonconvex = FunctionClass::zeta_ball(path, [](const Vector& h) { return h.cwiseAbs().minCoeff(); }, 1.0,
                                              false);
    CHECK(theta(nonconvex, FunctionVec(path, rng.normal_vector(4))).upper_bound_only);

    auto negative = FunctionClass::zeta_ball(path, [](const Vector& h) { return h.sum(); }, 1.0, true);
    Vector down = -Vector::Ones(4);
    CHECK_THROWS_AS(theta(negative, FunctionVec(path, down)), Error);
  }

  TEST_CASE("concentration penalty") {
    auto space = ts::plain_space(3);
    const FunctionVec h(space, vec3(0, 1, 2));
    CHECK(j_penalty(DiscreteDistribution::uniform(space), FunctionVec::constant(space, 4.0)).value ==
          doctest::Approx(0.0).epsilon(1e-15));
    const auto j = j_penalty(DiscreteDistribution::uniform(space), h);
    CHECK(j.value == doctest::Approx(1.0));
    CHECK(j.argmax == Eigen::Index{2});
    CHECK(j_penalty(DiscreteDistribution::point_mass(space, 2), h).value == 0.0);
  }

  TEST_CASE("centered penalties") {
    auto path = ts::path_space(3);
    const FunctionVec h(path, vec3(0, 1, 2));
    const auto sup = centered_theta(FunctionClass::sup_norm_ball(path), h);
    CHECK(sup.b_star == doctest::Approx(1.0));
    CHECK(sup.penalty.value == doctest::Approx(1.0));
    const auto lip = centered_theta(FunctionClass::lipschitz_ball(path), h);
    CHECK(lip.penalty.value == doctest::Approx(1.0));

    Rng rng(24);
    for (int trial = 0; trial < 100; ++trial) {
      auto space = ts::plain_space(2 + rng.index(7));
      auto mu = ts::random_distribution(space, rng, 0.01);
      const Vector v = 3.0 * rng.normal_vector(space->dim());
      const double mean = mu.weights().dot(v);
      const double var = mu.weights().dot(v.cwiseProduct(v)) - mean * mean;
      const auto c = centered_theta(FunctionClass::fisher_ball(mu), FunctionVec(space, v));
      CHECK(std::abs(c.penalty.value - std::sqrt(var)) <= 1e-9);
    }

    for (int trial = 0; trial < 6; ++trial) {
      for (const auto& cls : gauge_fleet(4, rng)) {
        const FunctionVec f(cls.space(), rng.normal_vector(4));
        const double raw = theta(cls, f).value;
        const auto c = centered_theta(cls, f);
        CHECK(c.penalty.value <= raw + 1e-12);
        CHECK(theta(cls, f.shifted(-c.b_star)).value == doctest::Approx(c.penalty.value).epsilon(1e-7));
      }
    }
  }

  TEST_CASE("lambda on the tv example") {
    auto space = ts::plain_space(3);
    auto p = DiscreteDistribution::uniform(space);
    auto sup = FunctionClass::sup_norm_ball(space);
    const FunctionVec h(space, vec3(0, 1, 2));
    const auto small = lambda_penalty(p, sup, 0.3, h);
    CHECK(small.value == doctest::Approx(0.3).epsilon(1e-9));
    CHECK(small.exact);
    REQUIRE(small.decomposition.has_value());
    const auto& d = *small.decomposition;
    CHECK((d.h1 + d.h2 - h.values()).norm() <= 1e-9);
    const double reproduced = j_penalty(p, FunctionVec(space, d.h1)).value + 0.3 * d.h2.cwiseAbs().maxCoeff();
    CHECK(reproduced == doctest::Approx(small.value).epsilon(1e-7));
    CHECK(lambda_penalty(p, sup, 1.0, h).value == doctest::Approx(5.0 / 6.0).epsilon(1e-9));
    CHECK(lambda_penalty(p, sup, 1.0, FunctionVec::constant(space, 3.0)).value == 0.0);
    CHECK_THROWS_AS(lambda_penalty(p, sup, 0.0, h), Error);
  }

  TEST_CASE("lambda is constant-invariant and bounded for every class") {
    Rng rng(25);
    for (int trial = 0; trial < 3; ++trial) {
      for (const auto& cls : gauge_fleet(4, rng)) {
        auto p = ts::random_distribution(cls.space(), rng, 0.02);
        const FunctionVec h(cls.space(), rng.normal_vector(4));
        const double eps = rng.uniform(0.1, 1.5);
        const auto lam = lambda_penalty(p, cls, eps, h);
        const double slack = cls.is_quadratic() ? 1e-6 : 1e-8;
        CHECK(lam.value >= -1e-12);
        CHECK(lam.lower_bound <= lam.value + 1e-12);
        CHECK(lam.value <= j_penalty(p, h).value + slack);
        CHECK(lam.value <= eps * theta(cls, h).value + slack);
        const double shifted = lambda_penalty(p, cls, eps, h.shifted(2.5)).value;
        CHECK(std::abs(shifted - lam.value) <= (cls.is_quadratic() ? 5e-4 : 1e-8));
        if (cls.is_quadratic()) {
          CHECK_FALSE(lam.exact);
          CHECK(lam.gap() <= 5e-4);
        }
      }
    }
  }

  TEST_CASE("gauge homogeneity and convexity") {
    Rng rng(26);
    for (int trial = 0; trial < 4; ++trial) {
      for (const auto& cls : gauge_fleet(5, rng)) {
        const FunctionVec h(cls.space(), rng.normal_vector(5));
        const FunctionVec g(cls.space(), rng.normal_vector(5));
        const double a = rng.uniform(0.1, 10.0);
        const double t = rng.uniform();
        const double th = theta(cls, h).value;
        const double tg = theta(cls, g).value;
        CHECK(std::abs(theta(cls, a * h).value - a * th) <= 1e-9 * (1.0 + a * th));
        CHECK(theta(cls, t * h + (1 - t) * g).value <= t * th + (1 - t) * tg + 1e-9);
      }
    }
  }

  TEST_CASE("explicit subsets overestimate the gauge") {
    Rng rng(27);
    auto space = ts::plain_space(3);
    std::vector<FunctionClass> fleet{FunctionClass::sup_norm_ball(space),
                                     FunctionClass::fisher_ball(ts::random_distribution(space, rng, 0.1))};
    for (const auto& cls : fleet) {
      const FunctionVec h(space, rng.normal_vector(3));
      const double exact = theta(cls, h).value;
      double previous = std::numeric_limits<double>::infinity();
      for (std::size_t m : {8, 16, 32, 64, 128}) {
        const double sampled = theta(discretize_structured_class(cls, m, 3), h).value;
        CHECK(sampled >= exact - 1e-9);
        CHECK(sampled <= previous + 1e-9);
        previous = sampled;
      }
    }
  }

  TEST_CASE("sin example decomposition") {
    auto grid = sin_grid();
    Vector t(grid->dim()), values(grid->dim()), w(grid->dim());
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      t(i) = -4.0 + 0.04 * static_cast<double>(i);
      values(i) = std::sin(2 * t(i)) + t(i);
      w(i) = std::exp(-0.5 * t(i) * t(i));
    }
    auto p = DiscreteDistribution::normalized(grid, w);
    auto lip = FunctionClass::lipschitz_ball(grid);
    const FunctionVec h(grid, values);
    const auto lam = lambda_penalty(p, lip, 1.0, h);
    const double manual = j_penalty(p, FunctionVec(grid, values - t)).value + theta(lip, FunctionVec(grid, t)).value;
    CHECK(lam.value <= manual + 1e-9);
    CHECK(manual <= 2.001);
    CHECK(theta(lip, h).value - lam.value >= 0.9);
  }
}
