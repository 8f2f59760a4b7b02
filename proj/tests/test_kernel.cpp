#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "hlab/errors.hpp"
#include "hlab/kernel.hpp"

using namespace hlab;

namespace {

Kernel named(const char* name, std::vector<double> params = {}, std::size_t n = 1) {
  return make_named_kernel(name, params, n);
}

std::vector<Kernel> registry_sample(std::size_t n) {
  return {named("box", {}, n),        named("box", {2.5}, n),         named("hardy", {}, n),
          named("adjoint_hardy", {}, n), named("exp", {}, n),         named("exp", {3.0}, n),
          named("power_box", {0.5}, n), named("power_box", {-0.5, 2.0}, n), named("bump", {0.3}, n),
          named("bump", {0.5, 2.0}, n)};
}

}  // namespace

TEST(MomentValues, BoxHalf) {
  const auto r = moment(named("box"), 0.5);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0, 1e-10);
  EXPECT_LE(r.error_estimate, 1e-10);
}

TEST(MomentValues, BoxSquareVolumeAndHalf) {
  const auto k = named("box", {}, 2);
  EXPECT_NEAR(moment(k, 0.0).value, 1.0, 1e-10);
  EXPECT_NEAR(moment(k, 0.5).value, 4.0, 1e-10);
}

TEST(MomentValues, ExpMatchesGamma) {
  EXPECT_NEAR(moment(named("exp"), 0.5).value, std::sqrt(std::numbers::pi), 1e-8);
  for (double rate : {0.5, 2.0})
    for (double a : {0.0, 0.3, 0.9}) {
      const auto r = moment(named("exp", {rate}), a);
      EXPECT_TRUE(r.converged);
      EXPECT_NEAR(r.value, boost::math::tgamma(1.0 - a) * std::pow(rate, a - 1.0), 1e-8) << rate << " " << a;
    }
}

TEST(MomentValues, HardyHalfAndDivergence) {
  EXPECT_NEAR(moment(named("hardy"), 0.5).value, 2.0, 1e-8);
  const auto r = moment(named("hardy"), 0.0);
  EXPECT_TRUE(std::isinf(r.value));
  EXPECT_FALSE(r.converged);
  EXPECT_TRUE(r.divergent);
  const auto b = moment(named("box"), 1.0);
  EXPECT_TRUE(std::isinf(b.value));
}

TEST(MomentValues, PowerBoxClosedForm) {
  for (double beta : {0.0, 0.5, 2.0})
    for (double a : {0.0, 0.5, 1.0}) {
      const double v = moment(named("power_box", {beta}), a).value;
      if (beta - a + 1.0 <= 0.0)
        EXPECT_TRUE(std::isinf(v));
      else
        EXPECT_NEAR(v, 1.0 / (beta - a + 1.0), 1e-9);
    }
  EXPECT_TRUE(std::isinf(moment(named("power_box", {0.0}), 1.0).value));
}

TEST(MomentValues, BumpHasUnitMass) {
  EXPECT_NEAR(moment(named("bump", {0.2}), 0.0).value, 1.0, 1e-10);
  EXPECT_NEAR(moment(named("bump", {0.5, 3.0}), 0.0).value, 1.0, 1e-10);
}

TEST(Bump, NormalizerAgreesWithTanhSinh) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double z = ts.integrate([](double x) { return std::exp(-1.0 / (1.0 - x * x)); }, -1.0, 1.0);
  EXPECT_NEAR(standard_bump(0.0), std::exp(-1.0) / z, 1e-14);
}

TEST(Registry, Errors) {
  EXPECT_THROW(named("gauss"), PreconditionError);
  EXPECT_THROW(named("exp", {0.0}), PreconditionError);
  EXPECT_THROW(named("exp", {-1.0}), PreconditionError);
  EXPECT_THROW(named("box", {1.0, 2.0}), PreconditionError);
  EXPECT_THROW(named("hardy", {2.0}), PreconditionError);
  EXPECT_THROW(named("bump", {1.5}), PreconditionError);
  EXPECT_THROW(named("power_box", {}), PreconditionError);
  EXPECT_THROW(moment(named("box"), 1.5), PreconditionError);
}

TEST(Registry, HardyKernelShape) {
  const auto k = named("hardy");
  for (double t : {0.5, 1.0, 2.0, 10.0}) {
    const double expect = t >= 1.0 ? 1.0 / t : 0.0;
    EXPECT_DOUBLE_EQ(k(std::vector<double>{t}), expect);
  }
}

TEST(Registry, SeparableFactorsMatchEvaluator) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logt(-4.0, 4.0);
  for (const auto& k : registry_sample(2)) {
    ASSERT_TRUE(k.separable());
    for (int i = 0; i < 200; ++i) {
      const std::vector<double> t{std::exp(logt(rng)), std::exp(logt(rng))};
      const double v = k(t);
      EXPECT_GE(v, 0.0);
      EXPECT_LE(std::abs(v - k.factor(0, t[0]) * k.factor(1, t[1])), 1e-12 * (1.0 + v));
    }
  }
}

TEST(Reflect, BoxBecomesHardy) {
  const auto r = reflect(named("box"));
  const auto h = named("hardy");
  for (double t : {0.25, 0.999, 1.0, 1.5, 7.0}) EXPECT_DOUBLE_EQ(r(std::vector<double>{t}), h(std::vector<double>{t}));
  EXPECT_DOUBLE_EQ(r.axis_range(0).lo, 1.0);
  EXPECT_TRUE(std::isinf(r.axis_range(0).hi));
}

TEST(Reflect, Involution) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> logt(-3.0, 3.0);
  for (const auto& k : registry_sample(2)) {
    const auto rr = reflect(reflect(k));
    for (int i = 0; i < 100; ++i) {
      const std::vector<double> t{std::exp(logt(rng)), std::exp(logt(rng))};
      EXPECT_NEAR(rr(t), k(t), 1e-12 * (1.0 + k(t)));
    }
  }
}

TEST(Reflect, MomentDualityOnRegistry) {
  const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
  for (const auto& k : registry_sample(1)) {
    const auto r = reflect(k);
    for (double a : grid) {
      const auto lhs = moment(r, a);
      const auto rhs = moment(k, 1.0 - a);
      if (std::isinf(lhs.value) || std::isinf(rhs.value)) {
        EXPECT_EQ(std::isinf(lhs.value), std::isinf(rhs.value)) << k.label() << " alpha " << a;
        continue;
      }
      EXPECT_LE(std::abs(lhs.value - rhs.value), 10.0 * (lhs.error_estimate + rhs.error_estimate) + 1e-15)
          << k.label() << " alpha " << a;
    }
  }
}

TEST(Truncation, InnerBox) {
  const auto k = truncate_inner(named("box"), 0.25);
  EXPECT_NEAR(moment(k, 0.0).value, 0.75, 1e-12);
  EXPECT_THROW(truncate_inner(named("exp"), 0.25), PreconditionError);
  EXPECT_THROW(truncate_inner(named("box", {2.0}), 0.25), PreconditionError);
  EXPECT_THROW(truncate_inner(named("box"), 1.0), PreconditionError);
}

TEST(Truncation, InnerChecksUndeclaredSupport) {
  Kernel::Parts parts;
  parts.dimension = 1;
  parts.evaluator = [](Kernel::Point t) { return t[0] <= 1.0 ? 2.0 * t[0] : 0.0; };
  const Kernel k(parts);
  EXPECT_NEAR(moment(truncate_inner(k, 0.5), 0.0).value, 0.75, 1e-9);
  parts.evaluator = [](Kernel::Point t) { return t[0] <= 1.5 ? 1.0 : 0.0; };
  EXPECT_THROW(truncate_inner(Kernel(parts), 0.5), PreconditionError);
}

TEST(Truncation, MonotoneInDelta) {
  const auto k = named("power_box", {0.5});
  double previous = 0.0;
  for (double d : {0.5, 0.25, 0.125, 0.01, 1e-4}) {
    const double v = moment(truncate_inner(k, d), 0.0).value;
    EXPECT_GE(v, previous);
    previous = v;
  }
  EXPECT_NEAR(previous, moment(k, 0.0).value, 1e-5);
}

TEST(Truncation, ScaledExp) {
  const auto k = truncate_scaled(named("exp"), 2.0);
  EXPECT_NEAR(moment(k, 0.0).value, (1.0 - std::exp(-2.0)) / 2.0, 1e-12);
}

TEST(Truncation, ScaledMatchesRestrictedMass) {
  for (const auto& k : registry_sample(2)) {
    for (double m : {0.5, 3.0}) {
      const double scaled_mass = moment(truncate_scaled(k, m), 0.0).value * m * m;
      const double restricted = moment(restrict_to(k, {{0.0, m}, {0.0, m}}), 0.0).value;
      EXPECT_NEAR(scaled_mass, restricted, 1e-8 * (1.0 + restricted)) << k.label() << " m=" << m;
    }
  }
}

TEST(Algebra, SumIsAdditive) {
  const auto a = named("exp", {2.0}, 2);
  const auto b = named("box", {}, 2);
  const auto s = kernel_sum(a, b);
  EXPECT_FALSE(s.separable());
  for (double alpha : {0.0, 0.5}) {
    const auto ms = moment(s, alpha, 1e-8);
    const auto ma = moment(a, alpha);
    const auto mb = moment(b, alpha);
    EXPECT_TRUE(ms.converged);
    EXPECT_LE(std::abs(ms.value - ma.value - mb.value),
              ms.error_estimate + ma.error_estimate + mb.error_estimate + 1e-12);
  }
}

TEST(Algebra, NestedPathAgreesWithProduct) {
  for (const auto& k : {named("exp", {}, 2), named("box", {}, 2), named("bump", {0.4}, 2)}) {
    const std::vector<double> alpha{0.25, 0.5};
    const auto fast = moment(k, alpha);
    const auto slow = moment_nested(k, alpha, 1e-8);
    EXPECT_TRUE(slow.converged);
    EXPECT_NEAR(fast.value, slow.value, 1e-7) << k.label();
  }
}

TEST(Algebra, ZeroKernel) {
  const auto z = zero_kernel(2);
  const auto r = moment(z, 0.0);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.value, 0.0);
}

TEST(Moment, PartialMomentUpperLimit) {
  // int_0^X t^{-a} dt on the box kernel.
  const std::vector<double> alpha{0.3};
  for (double X : {0.1, 0.5, 1.0, 4.0}) {
    const std::vector<double> up{X};
    const auto r = moment_general(named("box"), alpha, 1e-12, up);
    EXPECT_NEAR(r.value, std::pow(std::min(X, 1.0), 0.7) / 0.7, 1e-11);
  }
  const std::vector<double> neg{-0.2};
  EXPECT_NEAR(moment_general(named("box"), neg, 1e-12).value, 1.0 / 1.2, 1e-11);
}
