#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hlab/battery.hpp"
#include "hlab/errors.hpp"
#include "hlab/hausdorff.hpp"

using namespace hlab;
constexpr double pi = std::numbers::pi;

namespace {

Kernel named(const char* name, std::vector<double> params = {}, std::size_t n = 1) {
  return make_named_kernel(name, params, n);
}

PointwiseMap indicator(double a, double b) {
  return PointwiseMap::line([a, b](double x) { return Complex(x > a && x < b ? 1.0 : 0.0); }, {a, b});
}

double at(const Kernel& k, const PointwiseMap& f, double x, QuadConfig q = {}) {
  const auto v = hausdorff_at(k, f, std::span<const double>(&x, 1), q);
  EXPECT_TRUE(v.converged);
  return v.value.real();
}

std::vector<Kernel> finite_mass_kernels(std::size_t n) {
  return {named("box", {}, n), named("exp", {}, n), named("power_box", {1.0}, n), named("bump", {0.3}, n),
          named("box", {2.0}, n)};
}

}  // namespace

TEST(Hausdorff, BoxOnUnitIndicator) {
  const auto k = named("box");
  const auto f = indicator(0.0, 1.0);
  EXPECT_NEAR(at(k, f, 0.5), std::log(2.0), 1e-10);
  for (double x : {0.01, 0.3, 0.99}) EXPECT_NEAR(at(k, f, x), std::log(1.0 / x), 1e-10);
  EXPECT_NEAR(at(k, f, 1.5), 0.0, 1e-12);
  EXPECT_NEAR(at(k, f, -0.5), 0.0, 1e-12);
}

TEST(Hausdorff, AdjointHardyOnShiftedIndicator) {
  const auto k = named("adjoint_hardy");
  const auto f = indicator(1.0, 2.0);
  for (double x : {0.1, 0.5, 1.0}) EXPECT_NEAR(at(k, f, x), std::log(2.0), 1e-10) << x;
  for (double x : {1.2, 1.7}) EXPECT_NEAR(at(k, f, x), std::log(2.0 / x), 1e-10) << x;
  for (double x : {2.0, 3.0}) EXPECT_NEAR(at(k, f, x), 0.0, 1e-12) << x;
}

TEST(Hausdorff, HardyAverage) {
  const auto k = named("hardy");
  const auto f = PointwiseMap::line([](double x) { return Complex(x > 0.0 ? std::exp(-x) : 0.0); }, {1.0});
  for (double x : {1e-3, 0.1, 1.0, 5.0, 40.0}) EXPECT_NEAR(at(k, f, x), (1.0 - std::exp(-x)) / x, 1e-10) << x;
}

TEST(Hausdorff, ZeroMapGivesZero) {
  const auto s = GridSpec::uniform(2, 4.0, 16);
  for (const auto& k : finite_mass_kernels(2)) {
    const auto g = apply_hausdorff(k, PointwiseMap::zero(2), s, {});
    const auto a = apply_adjoint(k, PointwiseMap::zero(2), s, {});
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_EQ(g.samples[i], Complex{});
      EXPECT_EQ(a.samples[i], Complex{});
    }
  }
}

TEST(Hausdorff, NarrowBumpIsApproximateIdentity) {
  const auto f = battery::gaussian().f;
  double previous = 0.0;
  for (double w : {0.04, 0.02, 0.01}) {
    const auto k = named("bump", {w});
    double worst = 0.0;
    for (double x = -2.0; x <= 2.0; x += 0.05) worst = std::max(worst, std::abs(at(k, f, x) - f(x).real()));
    EXPECT_LT(worst, 2.0 * w * w);
    if (previous > 0.0) EXPECT_NEAR(previous / worst, 4.0, 0.5);
    previous = worst;
  }
}

TEST(Hausdorff, ValueAtOriginUsesInverseFirstMoment) {
  // phi(t)/t integrates to the alpha = 1 moment.
  const auto f = battery::gaussian().f;
  for (const auto& k : {named("bump", {0.3}), named("power_box", {1.0}), named("hardy")}) {
    EXPECT_NEAR(at(k, f, 0.0), moment(k, 1.0).value, 1e-9) << k.label();
  }
}

TEST(Adjoint, BoxOnUnitIndicator) {
  const auto k = named("box");
  const auto f = indicator(0.0, 1.0);
  for (double x : {0.2, 1.0, 2.0, 8.0}) {
    const auto v = adjoint_at(k, f, std::span<const double>(&x, 1), {});
    EXPECT_NEAR(v.value.real(), std::min(1.0, 1.0 / x), 1e-10) << x;
  }
}

TEST(Adjoint, EqualsHausdorffOfReflection) {
  const auto s = GridSpec::uniform(1, 8.0, 64);
  const QuadConfig q{1e-10, 200, true};
  for (const auto& k : {named("box"), named("exp"), named("power_box", {1.0}), named("bump", {0.3}), named("box", {2.0})}) {
    for (const auto& b : battery::lp_battery(1)) {
      const auto lhs = apply_adjoint(k, b.f, s, q);
      const auto rhs = apply_hausdorff(reflect(k), b.f, s, q);
      for (std::size_t i = 0; i < lhs.size(); ++i)
        EXPECT_LE(std::abs(lhs.samples[i] - rhs.samples[i]), 2.0 * q.tolerance) << k.label() << " " << b.name;
    }
  }
}

TEST(Hausdorff, LinearDomainAgreesWithLogDomain) {
  const QuadConfig log_q{1e-10, 200, true};
  const QuadConfig lin_q{1e-10, 400, false};
  const auto f = battery::poisson().f;
  for (const auto& k : {named("box"), named("exp"), named("hardy"), named("bump", {0.3})}) {
    for (double x : {-3.0, 0.25, 2.0}) {
      const auto a = hausdorff_at(k, f, std::span<const double>(&x, 1), log_q);
      const auto b = hausdorff_at(k, f, std::span<const double>(&x, 1), lin_q);
      EXPECT_TRUE(b.converged);
      EXPECT_NEAR(a.value.real(), b.value.real(), 1e-9) << k.label() << " " << x;
    }
  }
}

TEST(Hausdorff, LinearInTheMap) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> z;
  const auto s = GridSpec::uniform(1, 6.0, 64);
  const QuadConfig q;
  const auto battery_fns = battery::lp_battery(1);
  for (const auto& k : finite_mass_kernels(1)) {
    for (std::size_t i = 0; i + 1 < battery_fns.size(); ++i) {
      const Complex a(z(rng), z(rng)), b(z(rng), z(rng));
      const auto& f = battery_fns[i].f;
      const auto& g = battery_fns[i + 1].f;
      const auto lhs = apply_hausdorff(k, combine(a, f, b, g), s, q);
      const auto hf = apply_hausdorff(k, f, s, q);
      const auto hg = apply_hausdorff(k, g, s, q);
      for (std::size_t m = 0; m < lhs.size(); ++m) {
        const Complex rhs = a * hf.samples[m] + b * hg.samples[m];
        EXPECT_LE(std::abs(lhs.samples[m] - rhs), 2.0 * q.tolerance * (std::abs(a) + std::abs(b)))
            << k.label();
      }
    }
  }
}

TEST(Hausdorff, AdditiveInTheKernel) {
  const auto s = GridSpec::uniform(1, 6.0, 64);
  const QuadConfig q;
  const auto k1 = named("exp", {2.0});
  const auto k2 = named("box");
  const auto sum = kernel_sum(k1, k2);
  for (const auto& b : battery::lp_battery(1)) {
    const auto lhs = apply_hausdorff(sum, b.f, s, q);
    const auto r1 = apply_hausdorff(k1, b.f, s, q);
    const auto r2 = apply_hausdorff(k2, b.f, s, q);
    for (std::size_t m = 0; m < lhs.size(); ++m)
      EXPECT_LE(std::abs(lhs.samples[m] - r1.samples[m] - r2.samples[m]), 2.0 * q.tolerance) << b.name;
  }
}

TEST(Hausdorff, PositivityPreserved) {
  const auto s = GridSpec::uniform(1, 10.0, 128);
  const QuadConfig q;
  for (const auto& k : finite_mass_kernels(1))
    for (const auto& f : {battery::gaussian().f, battery::poisson().f, battery::unit_indicator().f}) {
      const auto g = apply_hausdorff(k, f, s, q);
      for (const auto& v : g.samples) EXPECT_GE(v.real(), -q.tolerance);
    }
}

TEST(Hausdorff, MinkowskiBound) {
  const auto s = GridSpec::uniform(1, 64.0, 4096);
  const QuadConfig q;
  const std::vector<double> ps{1.0, 1.5, 2.0, 3.0, std::numeric_limits<double>::infinity()};
  for (const auto& k : {named("box"), named("hardy"), named("exp"), named("power_box", {1.0}), named("bump", {0.3})}) {
    for (double p : ps) {
      const double target = moment(k, std::isinf(p) ? 1.0 : 1.0 - 1.0 / p).value;
      if (std::isinf(target)) continue;
      for (const auto& b : battery::lp_battery(1)) {
        const double ratio = lp_norm(apply_hausdorff(k, b.f, s, q), p) / lp_norm(sample(b.f, s), p);
        EXPECT_LE(ratio, 1.02 * target) << k.label() << " p=" << p << " " << b.name;
      }
    }
  }
}

TEST(Hausdorff, DivergentIntegralRaisesWithNode) {
  const auto one = PointwiseMap::line([](double) { return Complex(1.0); });
  const auto s = GridSpec::uniform(1, 1.0, 4);
  try {
    apply_hausdorff(named("box"), one, s, {});
    FAIL() << "expected QuadratureError";
  } catch (const QuadratureError& e) {
    ASSERT_EQ(e.node().size(), 1u);
    EXPECT_DOUBLE_EQ(e.node()[0], -0.75);
  }
}

TEST(Hausdorff, SeparableAndNestedPathsAgree) {
  const auto s = GridSpec::uniform(2, 3.0, 12);
  const auto g = battery::gaussian().f;
  const auto sep = tensor({g, g});
  const auto gen = PointwiseMap::general(
      2, [g](std::span<const double> x) { return g(x[0]) * g(x[1]); }, {{-1.0, 1.0}, {-1.0, 1.0}});
  const QuadConfig q{1e-8, 200, true};
  for (const auto& k : {named("exp", {}, 2), named("box", {}, 2), kernel_sum(named("box", {}, 2), named("bump", {0.4}, 2))}) {
    const auto a = apply_hausdorff(k, sep, s, q);
    const auto b = apply_hausdorff(k, gen, s, q);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(std::abs(a.samples[i] - b.samples[i]), 4e-8) << k.label();
  }
}

TEST(Hausdorff, InterpolatedFallbackTracksClosedForm) {
  const auto fine = GridSpec::uniform(1, 8.0, 2048);
  const InterpolatedMap m(sample(battery::gaussian().f, fine));
  const auto s = GridSpec::uniform(1, 4.0, 32);
  const auto k = named("bump", {0.3});
  const auto exact = apply_hausdorff(k, battery::gaussian().f, s, {});
  const auto approx = apply_hausdorff(k, m.as_map(), s, {1e-7, 4000, true});
  for (std::size_t i = 0; i < s.points[0]; ++i)
    EXPECT_LE(std::abs(exact.samples[i] - approx.samples[i]), 2.0 * m.error_estimate() + 1e-7);
}
