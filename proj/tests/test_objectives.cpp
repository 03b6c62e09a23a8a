#include <doctest.h>

#include <cmath>
#include <memory>

#include "declip/errors.hpp"
#include "declip/objectives.hpp"
#include "declip/rng.hpp"

using namespace declip;

namespace {

std::shared_ptr<const LogisticObjective> tiny_logistic(const std::string& text, double l2 = 0.0) {
  const Dataset ds = parse_libsvm(text);
  Shard shard{0, ds.dim, ds.samples};
  return std::make_shared<LogisticObjective>(shard, ds.dim, l2);
}

std::vector<ObjectivePtr> all_kinds() {
  std::vector<ObjectivePtr> objs;
  Matrix a(2, 2);
  a(0, 0) = 2.0;
  a(0, 1) = 0.5;
  a(1, 0) = 0.5;
  a(1, 1) = 1.0;
  objs.push_back(std::make_shared<QuadraticObjective>(a, Vec{1.0, -1.0}));
  objs.push_back(std::make_shared<ExponentialObjective>(Vec{0.7, -0.3}));
  objs.push_back(tiny_logistic("1 1:0.8 2:-0.4\n-1 1:-0.2 2:0.9\n1 2:1.5\n", 0.05));
  objs.push_back(std::make_shared<QuarticObjective>(Vec{1.0, 2.5}));
  objs.push_back(std::make_shared<DoubleWellObjective>(2));
  return objs;
}

}  // namespace

TEST_CASE("value hand examples") {
  const QuadraticObjective quad(Matrix::identity(2), Vec{0.0, 0.0});
  CHECK(quad.value({3.0, 4.0}) == doctest::Approx(12.5));

  const ExponentialObjective expo(Vec{1.0});
  CHECK(expo.value({0.0}) == doctest::Approx(1.0));

  const DoubleWellObjective well(2);
  CHECK(well.value({1.0, -1.0}) == 0.0);

  const QuarticObjective quart(Vec{2.0});
  CHECK(quart.value({2.0}) == doctest::Approx(8.0));  // 2 * 16 / 4
}

TEST_CASE("gradient hand examples") {
  const QuadraticObjective quad(Matrix::identity(2), Vec{0.0, 0.0});
  const Vec g = quad.gradient({3.0, 4.0});
  CHECK(g[0] == doctest::Approx(3.0));
  CHECK(g[1] == doctest::Approx(4.0));

  const ExponentialObjective expo(Vec{2.0});
  CHECK(expo.gradient({0.0})[0] == doctest::Approx(2.0));

  // d/dx log(1 + e^{-x}) at x = 0 is -sigma(0) = -1/2
  const auto logi = tiny_logistic("1 1:1\n");
  CHECK(logi->gradient({0.0})[0] == doctest::Approx(-0.5));
}

TEST_CASE("hvp hand examples") {
  const QuadraticObjective quad(Matrix::diag({1.0, 2.0}), Vec{0.0, 0.0});
  const Vec h = quad.hvp({0.3, -0.7}, {1.0, 1.0});
  CHECK(h[0] == doctest::Approx(1.0));
  CHECK(h[1] == doctest::Approx(2.0));

  const ExponentialObjective expo(Vec{1.0});
  CHECK(expo.hvp({0.0}, {1.0})[0] == doctest::Approx(1.0));

  // double well Hessian is diag(12 x_j^2 - 4)
  const DoubleWellObjective well(2);
  const Vec hw = well.hvp({1.0, 0.0}, {1.0, 1.0});
  CHECK(hw[0] == doctest::Approx(8.0));
  CHECK(hw[1] == doctest::Approx(-4.0));
}

TEST_CASE("dimension mismatches are rejected") {
  const QuadraticObjective quad(Matrix::identity(2), Vec{0.0, 0.0});
  CHECK_THROWS_AS(quad.value({1.0}), DimensionMismatchError);
  CHECK_THROWS_AS(quad.gradient({1.0, 2.0, 3.0}), DimensionMismatchError);
}

TEST_CASE("gradients agree with central differences on all kinds") {
  Rng rng(1001);
  const double h = 1e-5;
  for (const auto& obj : all_kinds()) {
    for (int trial = 0; trial < 50; ++trial) {
      Vec x(obj->dim()), v(obj->dim());
      for (double& c : x) c = 2.0 * rng.next_double() - 1.0;
      for (double& c : v) c = rng.next_gaussian();
      const double vn = norm2(v);
      for (double& c : v) c /= vn;

      Vec xp = x, xm = x;
      axpy(h, v, xp);
      axpy(-h, v, xm);
      const double fd = (obj->value(xp) - obj->value(xm)) / (2.0 * h);
      const double analytic = dot(obj->gradient(x), v);
      CHECK(std::abs(fd - analytic) <= 1e-5 * (1.0 + std::abs(analytic)));
    }
  }
}

TEST_CASE("hvp agrees with gradient central differences on all kinds") {
  Rng rng(1002);
  const double h = 1e-5;
  for (const auto& obj : all_kinds()) {
    for (int trial = 0; trial < 50; ++trial) {
      Vec x(obj->dim()), v(obj->dim());
      for (double& c : x) c = 2.0 * rng.next_double() - 1.0;
      for (double& c : v) c = rng.next_gaussian();
      const double vn = norm2(v);
      for (double& c : v) c /= vn;

      Vec xp = x, xm = x;
      axpy(h, v, xp);
      axpy(-h, v, xm);
      const Vec gp = obj->gradient(xp), gm = obj->gradient(xm);
      const Vec hv = obj->hvp(x, v);
      double err = 0.0;
      for (int j = 0; j < obj->dim(); ++j) {
        const double fd = (gp[j] - gm[j]) / (2.0 * h);
        err += (fd - hv[j]) * (fd - hv[j]);
      }
      CHECK(std::sqrt(err) <= 1e-4 * (1.0 + norm2(hv)));
    }
  }
}

TEST_CASE("hessian_norm on known spectra") {
  const QuadraticObjective quad(Matrix::diag({1.0, 2.0, 3.0}), Vec{0.0, 0.0, 0.0});
  CHECK(hessian_norm(quad, {0.5, 0.5, 0.5}, 1e-10) == doctest::Approx(3.0).epsilon(1e-8));

  // logistic single sample a=(1) at x=0: sigma(0)(1-sigma(0)) = 1/4
  const auto logi = tiny_logistic("1 1:1\n");
  CHECK(hessian_norm(*logi, {0.0}, 1e-10) == doctest::Approx(0.25).epsilon(1e-8));

  // double well at the origin: Hessian -4 I, largest magnitude 4
  const DoubleWellObjective well(2);
  CHECK(hessian_norm(well, {0.0, 0.0}, 1e-10) == doctest::Approx(4.0).epsilon(1e-8));

  // indefinite Hessian: dominant magnitude wins
  const QuadraticObjective indef(Matrix::diag({-5.0, 2.0}), Vec{0.0, 0.0});
  CHECK(hessian_norm(indef, {0.0, 0.0}, 1e-10) == doctest::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("stochastic oracle determinism and full-batch reduction") {
  const auto logi = tiny_logistic("1 1:0.5 2:1\n-1 1:-1 2:0.25\n1 2:2\n", 0.1);
  const StochasticOracle oracle(logi, 3, 77);
  const Vec x{0.3, -0.4};

  const auto d1 = oracle.stochastic_gradient(x, 0, 5);
  const auto d2 = oracle.stochastic_gradient(x, 0, 5);
  CHECK(d1.g == d2.g);
  CHECK(d1.batch == d2.batch);

  // batch == shard size: exactly the full gradient, bit for bit
  const Vec full = logi->gradient(x);
  CHECK(d1.g == full);

  const StochasticOracle small(logi, 1, 77);
  CHECK(small.stochastic_gradient(x, 0, 1).batch.size() == 1);
}

TEST_CASE("stochastic oracle is unbiased by enumeration on tiny shards") {
  const auto logi = tiny_logistic("1 1:0.5 2:1\n-1 1:-1 2:0.25\n", 0.05);
  const Vec x{0.2, 0.7};
  // batch size 1: the two possible draws are the per-sample gradients
  Vec mean(2, 0.0);
  for (int s = 0; s < 2; ++s) axpy(0.5, logi->sample_gradient(x, s), mean);
  const Vec full = logi->gradient(x);
  CHECK(std::abs(mean[0] - full[0]) <= 1e-14);
  CHECK(std::abs(mean[1] - full[1]) <= 1e-14);

  // the realized draw is always one of the enumerated outcomes
  const StochasticOracle oracle(logi, 1, 3);
  for (std::int64_t k = 1; k <= 20; ++k) {
    const auto draw = oracle.stochastic_gradient(x, 0, k);
    REQUIRE(draw.batch.size() == 1);
    CHECK(draw.g == logi->sample_gradient(x, draw.batch[0]));
  }
}

TEST_CASE("draws hit every sample across iterations") {
  const auto logi = tiny_logistic("1 1:1\n-1 1:-1\n1 2:1\n-1 2:-1\n");
  const StochasticOracle oracle(logi, 1, 11);
  std::vector<int> counts(4, 0);
  for (std::int64_t k = 1; k <= 200; ++k)
    ++counts[oracle.stochastic_gradient({0.0, 0.0}, 0, k).batch[0]];
  for (int c : counts) CHECK(c > 20);  // roughly uniform over 4 samples
}

TEST_CASE("certificate is exactly tight for quadratics") {
  const QuadraticObjective quad(Matrix::identity(2), Vec{0.0, 0.0});
  const std::vector<std::pair<double, double>> box{{-5.0, 5.0}, {-5.0, 5.0}};
  const SmoothnessCertificate good = certify_smoothness(quad, 1.0, 0.0, box, 9);
  CHECK(good.max_violation <= 1e-12);
  CHECK(good.grid_points == 81);

  const SmoothnessCertificate bad = certify_smoothness(quad, 0.5, 0.0, box, 9);
  CHECK(bad.max_violation > 0.0);
}

TEST_CASE("certificate sharpness at 0.99 of the true constant") {
  const QuadraticObjective quad(Matrix::diag({2.0, 0.5}), Vec{0.0, 0.0});
  const std::vector<std::pair<double, double>> box{{-3.0, 3.0}, {-3.0, 3.0}};
  CHECK(certify_smoothness(quad, 2.0, 0.0, box, 9).max_violation <= 1e-12);
  CHECK(certify_smoothness(quad, 0.99 * 2.0, 0.0, box, 9).max_violation > 0.0);
}

TEST_CASE("exponential certifies (L0=0, L1=2) within radius 1/2") {
  // |e^y - e^x| <= e^x (e^{1/2} - 1)/(1/2) |y-x| and e^{1/2} < 2 on |y-x| <= 1/2
  const ExponentialObjective expo(Vec{1.0});
  const SmoothnessCertificate cert = certify_smoothness(expo, 0.0, 2.0, {{-2.0, 2.0}}, 101);
  CHECK(cert.max_violation <= 0.0);
  CHECK(cert.verified_radius == doctest::Approx(0.5));
}

TEST_CASE("certify budget control") {
  const QuadraticObjective quad(Matrix::identity(2), Vec{0.0, 0.0});
  const std::vector<std::pair<double, double>> box{{-1.0, 1.0}, {-1.0, 1.0}};
  // 64^2 = 4096 grid points -> 16.7M ordered pairs, over the 1M budget
  CHECK_THROWS_AS(certify_smoothness(quad, 1.0, 0.0, box, 64, /*allow_sampling=*/false),
                  BudgetExceededError);
  const SmoothnessCertificate sampled = certify_smoothness(quad, 1.0, 0.0, box, 64);
  CHECK(sampled.max_violation <= 1e-12);
}

TEST_CASE("fit_smoothness recovers exact lines and flat data") {
  const SmoothnessFit line = fit_smoothness({{1.0, 2.0}, {2.0, 4.0}, {3.0, 6.0}});
  CHECK(line.l0_hat == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(line.l1_hat == doctest::Approx(2.0));
  CHECK(line.pearson_r == doctest::Approx(1.0));

  const SmoothnessFit flat = fit_smoothness({{1.0, 5.0}, {2.0, 5.0}});
  CHECK(flat.l0_hat == doctest::Approx(5.0));
  CHECK(flat.l1_hat == doctest::Approx(0.0));
  CHECK(flat.pearson_r == 0.0);

  CHECK_THROWS_AS(fit_smoothness({{1.0, 2.0}, {1.0, 3.0}}), DegenerateInputError);
  // negative slopes clamp to zero
  const SmoothnessFit neg = fit_smoothness({{1.0, 6.0}, {2.0, 4.0}, {3.0, 2.0}});
  CHECK(neg.l1_hat == 0.0);
}

TEST_CASE("convex gap inequality holds at certified constants") {
  // for convex f:
  //   ||grad f(y) - grad f(x)||^2 / (2(L0 + L1 ||grad f(y)||) + L1 ||grad f(y) - grad f(x)||)
  //     <= f(y) - f(x) - <grad f(x), y - x>
  Rng rng(1003);
  struct Case {
    ObjectivePtr obj;
    double l0, l1, radius;
  };
  std::vector<Case> cases;
  cases.push_back({std::make_shared<QuadraticObjective>(Matrix::diag({2.0, 0.5}), Vec{0.3, -0.1}),
                   2.0, 0.0, 10.0});
  cases.push_back({std::make_shared<ExponentialObjective>(Vec{1.0}), 0.0, 2.0, 0.5});
  cases.push_back({tiny_logistic("1 1:0.9\n-1 1:-0.7\n", 0.1), 0.35, 0.0, 10.0});

  for (const auto& c : cases) {
    for (int trial = 0; trial < 100; ++trial) {
      Vec x(c.obj->dim()), y(c.obj->dim());
      for (double& v : x) v = 2.0 * rng.next_double() - 1.0;
      Vec dir(c.obj->dim());
      for (double& v : dir) v = rng.next_gaussian();
      const double dn = norm2(dir);
      const double step = c.radius * rng.next_double();
      for (int j = 0; j < c.obj->dim(); ++j) y[j] = x[j] + step * dir[j] / dn;

      const Vec gx = c.obj->gradient(x), gy = c.obj->gradient(y);
      const double diff = norm2(sub(gy, gx));
      const double denom = 2.0 * (c.l0 + c.l1 * norm2(gy)) + c.l1 * diff;
      if (denom <= 0.0) continue;
      const double lhs = diff * diff / denom;
      const double rhs = c.obj->value(y) - c.obj->value(x) - dot(gx, sub(y, x));
      CHECK(lhs <= rhs + 1e-10);
    }
  }
}

TEST_CASE("averaged objective is the mean of its parts") {
  auto q1 = std::make_shared<QuadraticObjective>(Matrix::identity(1), Vec{0.0});
  auto q2 = std::make_shared<QuadraticObjective>(Matrix::identity(1), Vec{2.0});
  const AveragedObjective avg({q1, q2});
  // F(x) = x^2/2 - x, grad = x - 1, minimum at 1
  CHECK(avg.value({1.0}) == doctest::Approx(-0.5));
  CHECK(avg.gradient({1.0})[0] == doctest::Approx(0.0));
  CHECK(avg.hvp({0.0}, {3.0})[0] == doctest::Approx(3.0));
}
