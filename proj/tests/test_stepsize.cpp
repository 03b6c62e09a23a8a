#include <doctest.h>

#include <cmath>
#include <limits>

#include "declip/errors.hpp"
#include "declip/rng.hpp"
#include "declip/stepsize.hpp"

using namespace declip;

TEST_CASE("det_clip hand examples") {
  CHECK(det_clip_alpha(1.0, 0.0, {5.0, 9.0, 1.0}) == doctest::Approx(0.5));
  CHECK(det_clip_alpha(1.0, 1.0, {1.0, 1.0, 1.0}) == doctest::Approx(1.0 / 3.0));
  // min{1/2, 1/(3*2*0.1) = 5/3, 1/(3*2*5) = 1/30}
  CHECK(det_clip_alpha(1.0, 2.0, {0.1, 5.0, 0.0}) == doctest::Approx(1.0 / 30.0));
  CHECK_THROWS_AS(det_clip_alpha(0.0, 1.0, {}), NonPositiveL0Error);
  CHECK_THROWS_AS(det_clip_alpha(-1.0, 1.0, {}), NonPositiveL0Error);
}

TEST_CASE("det_clip drops zero-denominator terms") {
  // at a stationary point the gradient-dependent terms deactivate
  CHECK(det_clip_alpha(2.0, 5.0, {0.0, 0.0, 0.0}) == doctest::Approx(0.25));
  CHECK(det_clip_alpha(2.0, 0.0, {100.0, 100.0, 100.0}) == doctest::Approx(0.25));
}

TEST_CASE("NaN statistics are a hard error") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(det_clip_alpha(1.0, 1.0, {nan, 1.0, 1.0}), InvalidStatsError);
  CHECK_THROWS_AS(sto_nonconvex_alpha(1.0, 0.0, 0.0, 1.0, 3, {1.0, nan, 1.0}), InvalidStatsError);
}

TEST_CASE("sto_convex hand examples") {
  // L0=1, L1=0, rho=0, K=1, all-zero grads: alpha_hat = min{1/20, 1/(4 C1)=1/4, 1} = 0.05
  const StepSizeRule rule = StepSizeRule::sto_convex(1.0, 0.0, 0.0, 1);
  CHECK(rule.c1() == doctest::Approx(1.0));
  CHECK(rule.alpha({0.0, 0.0, 0.0}, 1) == doctest::Approx(0.05));

  // the sqrt clipping term: max_avg=4, L1=1 gives 1/sqrt(96) ~ 0.10206;
  // with L0 small it is the binding term (second term is 1/4)
  const double a = sto_convex_alpha(0.01, 1.0, 0.0, 1.0, 1, {0.0, 4.0, 0.0});
  CHECK(a <= 1.0 / std::sqrt(96.0) + 1e-15);
  CHECK(a == doctest::Approx(1.0 / std::sqrt(96.0)));

  // L1 = 0 degenerates to the classical case: the sqrt term drops out
  CHECK(sto_convex_alpha(0.01, 0.0, 0.0, 1.0, 1, {0.0, 4.0, 0.0}) == doctest::Approx(0.25));
}

TEST_CASE("sto_convex guard rejects C1 <= 0") {
  // C1 = 1 - 5 L1 - (240 L1^3 + 180 L1^2)/(1-sqrt(rho))^2
  CHECK_THROWS_AS(StepSizeRule::sto_convex(1.0, 0.2, 0.0, 10), InvalidRuleError);
  CHECK_NOTHROW(StepSizeRule::sto_convex(1.0, 0.05, 0.0, 10));
  // a sparser topology shrinks the feasible L1 range
  CHECK_THROWS_AS(StepSizeRule::sto_convex(1.0, 0.05, 0.9, 10), InvalidRuleError);
}

TEST_CASE("sto_nonconvex hand examples") {
  // L0=1, L1=0, rho=0, sigma=1, K=3: min{1/2, 1/(2(1.5+5)) = 1/13, 1} = 1/13
  CHECK(sto_nonconvex_alpha(1.0, 0.0, 0.0, 1.0, 3, {0.0, 0.0, 7.0}) == doctest::Approx(1.0 / 13.0));
  // L1=0 and sigma=0: alpha_hat = 1/sqrt(K+1) (may still lose to the middle term)
  const double a = sto_nonconvex_alpha(1e-12, 0.0, 0.0, 0.0, 3, {0.0, 0.0, 0.0});
  CHECK(a <= 0.5);
}

TEST_CASE("rules are nonincreasing in every gradient statistic") {
  Rng rng(204);
  const StepSizeRule det = StepSizeRule::det_clip(1.5, 0.7);
  const StepSizeRule cvx = StepSizeRule::sto_convex(1.5, 0.02, 0.25, 1000);
  const StepSizeRule ncv = StepSizeRule::sto_nonconvex(1.5, 0.7, 0.25, 0.4, 1000);
  for (int trial = 0; trial < 200; ++trial) {
    GradStats lo{10.0 * rng.next_double(), 10.0 * rng.next_double(), 10.0 * rng.next_double()};
    GradStats hi = lo;
    switch (rng.next_below(3)) {
      case 0: hi.max_local_grad_norm += 5.0 * rng.next_double(); break;
      case 1: hi.max_avg_grad_norm += 5.0 * rng.next_double(); break;
      default: hi.global_grad_norm += 5.0 * rng.next_double(); break;
    }
    for (const StepSizeRule* rule : {&det, &cvx, &ncv}) {
      const double a_lo = rule->alpha(lo, 1);
      const double a_hi = rule->alpha(hi, 1);
      CHECK(a_hi <= a_lo + 1e-15);
      CHECK(a_lo > 0.0);
      CHECK(std::isfinite(a_lo));
    }
  }
}

TEST_CASE("clipping bounds the per-step movement by 1/(3 L1)") {
  Rng rng(205);
  for (int trial = 0; trial < 200; ++trial) {
    const double l0 = 0.1 + rng.next_double();
    const double l1 = 0.1 + 2.0 * rng.next_double();
    GradStats s{20.0 * rng.next_double(), 20.0 * rng.next_double(), 0.0};
    const double a = det_clip_alpha(l0, l1, s);
    CHECK(a * s.max_local_grad_norm <= 1.0 / (3.0 * l1) + 1e-12);
  }
}

TEST_CASE("det_clip with L1=0 is the constant classical step") {
  const StepSizeRule rule = StepSizeRule::det_clip(4.0, 0.0);
  for (double g : {0.0, 0.5, 123.0})
    CHECK(rule.alpha({g, g, g}, 0) == doctest::Approx(0.125));
}

TEST_CASE("constant rule validates alpha") {
  CHECK(StepSizeRule::constant(0.3).alpha({1.0, 1.0, 1.0}, 9) == 0.3);
  CHECK_THROWS_AS(StepSizeRule::constant(0.0), InvalidRuleError);
  CHECK_THROWS_AS(StepSizeRule::constant(-0.5), InvalidRuleError);
}
