#include <doctest.h>

#include <cmath>

#include "ipmdro/critic.hpp"
#include "ipmdro/dro.hpp"
#include "ipmdro/error.hpp"
#include "ipmdro/ipm.hpp"
#include "ipmdro/penalties.hpp"
#include "instances.hpp"

using namespace ipmdro;
namespace ts = testing_support;

namespace {

Vector vec3(double a, double b, double c) { return (Vector(3) << a, b, c).finished(); }

struct ThreePoint {
  SpacePtr space = ts::plain_space(3);
  DiscreteDistribution p = DiscreteDistribution::point_mass(space, 0);
  DiscreteDistribution mu = DiscreteDistribution::make(space, vec3(0.5, 0.0, 0.5));
  FunctionClass sup = FunctionClass::sup_norm_ball(space);
  FunctionVec h{space, vec3(-1, 0, 1)};
};

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an ipmdro::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("critic") {
  TEST_CASE("critic loss values") {
    ThreePoint x;
    CHECK(critic_loss(x.p, x.mu, 1.0, x.sup, FunctionVec::zero(x.space)) == 0.0);
    CHECK(critic_loss(x.p, x.mu, 1.0, x.sup, x.h) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(critic_loss(x.p, x.mu, 0.5, x.sup, x.h) == doctest::Approx(-0.5));
    CHECK(critic_loss(x.p, x.mu, 0.5, x.sup, 10.0 * x.h) == doctest::Approx(-5.0));

    const auto bounded = critic_infimum(x.p, x.mu, 1.0, x.sup);
    CHECK(bounded.bounded);
    CHECK(bounded.value == 0.0);
    const auto open = critic_infimum(x.p, x.mu, 0.5, x.sup);
    CHECK_FALSE(open.bounded);
    CHECK(std::isinf(open.value));
    CHECK(open.distance == doctest::Approx(1.0));
    REQUIRE(open.ray.has_value());
    CHECK(critic_loss(x.p, x.mu, 0.5, x.sup, FunctionVec(x.space, *open.ray)) < 0.0);
  }

  TEST_CASE("critic loss is nonnegative inside the ball") {
    Rng rng(61);
    auto space = ts::plain_space(5);
    for (int trial = 0; trial < 20; ++trial) {
      auto cls = ts::random_even_explicit(space, 2, rng);
      auto p = ts::random_distribution(space, rng, 0.05);
      auto mu = ts::random_distribution(space, rng, 0.05);
      const double eps = ipm_distance(cls, mu, p).value * rng.uniform(1.0, 2.0);
      for (int k = 0; k < 10; ++k) {
        const FunctionVec h(space, 3.0 * rng.normal_vector(5));
        CHECK(critic_loss(p, mu, eps, cls, h) >= -1e-8);
      }
      // mu = P: constants are the minimizers.
      const double c = rng.uniform(-2.0, 2.0);
      const auto constant = FunctionVec::constant(space, c);
      CHECK(critic_loss(p, p, 0.3, cls, constant) == doctest::Approx(0.3 * theta(cls, constant).value));
    }
    auto sup = FunctionClass::sup_norm_ball(space);
    auto p = ts::random_distribution(space, rng);
    CHECK(critic_loss(p, p, 0.3, sup, FunctionVec::constant(space, 0.0)) == 0.0);
    CHECK(critic_loss(p, p, 0.3, sup, FunctionVec::constant(space, 2.0)) == doctest::Approx(0.6));
  }

  TEST_CASE("alignment on the three-point example") {
    ThreePoint x;
    const auto rep = check_alignment(x.p, x.sup, 1.0, x.h);
    CHECK(rep.aligned);
    CHECK(rep.exact);
    CHECK(rep.eps_theta == doctest::Approx(1.0));
    CHECK(std::abs(rep.lambda_value - rep.eps_theta) <= 1e-9);
    REQUIRE(rep.witness_mu.has_value());
    CHECK(rep.witness_ball_violation <= 1e-7);
    CHECK(rep.witness_residual <= 1e-6);
    CHECK(expectation(*rep.witness_mu, x.h) - expectation(x.p, x.h) == doctest::Approx(1.0));

    const auto constant = check_alignment(x.p, x.sup, 1.0, FunctionVec::constant(x.space, 2.0));
    CHECK_FALSE(constant.aligned);
    CHECK(constant.gap == doctest::Approx(2.0));
    CHECK_FALSE(constant.witness_mu.has_value());
  }

  TEST_CASE("fisher alignment through a boundary measure") {
    auto space = ts::plain_space(4);
    auto p = DiscreteDistribution::uniform(space);
    auto fisher = FunctionClass::fisher_ball(p);
    const Vector raw = (Vector(4) << 1.0, -0.5, 0.2, -0.7).finished();
    const FunctionVec h(space, raw.array() - raw.mean());
    const double eps = 0.2;
    const double norm = std::sqrt(h.values().squaredNorm() / 4.0);
    const Vector boundary = p.weights() + eps * (0.25 * h.values()) / norm;
    REQUIRE(boundary.minCoeff() > 0.0);
    auto mu = DiscreteDistribution::make(space, boundary, Tolerances{.distribution_sum = 1e-10});
    CHECK(ipm_distance(fisher, mu, p).value == doctest::Approx(eps).epsilon(1e-10));
    CHECK(expectation(mu, h) - expectation(p, h) == doctest::Approx(eps * norm).epsilon(1e-10));

    const auto rep = check_alignment(p, fisher, eps, h);
    CHECK(rep.aligned);
    CHECK(std::abs(rep.lambda_value - rep.eps_theta) <= 1e-6);
    CHECK(rep.witness_ball_violation <= 1e-7);
  }

  TEST_CASE("witness lp equals lambda") {
    Rng rng(62);
    for (int trial = 0; trial < 15; ++trial) {
      auto space = ts::plain_space(3 + rng.index(4));
      auto cls = ts::random_even_explicit(space, 2, rng);
      auto p = ts::random_distribution(space, rng, 0.05);
      const FunctionVec h(space, rng.normal_vector(space->dim()));
      const double eps = rng.uniform(0.05, 1.5);
      CHECK(witness_lp_value(p, cls, eps, h) == doctest::Approx(lambda_penalty(p, cls, eps, h).value).epsilon(1e-8));
    }
  }

  TEST_CASE("generated instances are aligned and shifted ones are not") {
    Rng rng(63);
    for (int trial = 0; trial < 20; ++trial) {
      auto space = ts::plain_space(3 + rng.index(4));
      auto cls = ts::random_even_explicit(space, 2, rng);
      auto p = ts::random_distribution(space, rng, 0.05);
      const auto inst = make_aligned_instance(cls, p, rng);
      const auto rep = check_alignment(inst.p, cls, inst.eps, inst.h);
      CHECK(rep.aligned);
      CHECK(std::abs(rep.lambda_value - rep.eps_theta) <= 1e-6);
      CHECK(rep.witness_residual <= 1e-6);
      CHECK(rep.witness_ball_violation <= 1e-7);

      const FunctionVec shifted = inst.h.shifted(5.0);
      const auto off = check_alignment(inst.p, cls, inst.eps, shifted);
      CHECK_FALSE(off.aligned);
      CHECK(off.gap > 1e-4);
      CHECK(witness_lp_value(inst.p, cls, inst.eps, shifted) < off.eps_theta - 1e-6);
    }
  }

  TEST_CASE("two-sided check") {
    ThreePoint x;
    const auto rep = two_sided_check(x.p, x.mu, x.sup, 1.0, x.h);
    CHECK(rep.sup_residual <= 1e-6);
    CHECK(rep.inf_residual <= 1e-6);
    CHECK(rep.sup_value == doctest::Approx(0.0));  // E_P h + 1 = -1 + 1
    CHECK(rep.inf_value == doctest::Approx(-1.0));  // E_mu h - 1 = 0 - 1

    const auto zero = two_sided_check(x.p, x.mu, x.sup, 1.0, FunctionVec::zero(x.space));
    CHECK(zero.sup_value == doctest::Approx(0.0));
    CHECK(zero.inf_value == doctest::Approx(0.0));

    Rng rng(64);
    for (int trial = 0; trial < 20; ++trial) {
      auto space = ts::plain_space(3 + rng.index(4));
      auto cls = ts::random_even_explicit(space, 2, rng);
      auto p = ts::random_distribution(space, rng, 0.05);
      const auto inst = make_aligned_instance(cls, p, rng);
      const auto two = two_sided_check(inst.p, inst.mu, cls, inst.eps, inst.h);
      CHECK(two.sup_residual <= 1e-6);
      CHECK(two.inf_residual <= 1e-6);
    }

    auto uneven = FunctionClass::explicit_set({FunctionVec(x.space, vec3(-1, 0, 1))});
    CHECK(code_of([&] { two_sided_check(x.p, x.mu, uneven, 1.0, x.h); }) == ErrorCode::NotEven);
    CHECK(code_of([&] { two_sided_check(x.p, x.mu, x.sup, 1.0, FunctionVec::constant(x.space, 1.0)); }) ==
          ErrorCode::NotAligned);
  }
}
