#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hlab/battery.hpp"
#include "hlab/errors.hpp"
#include "hlab/quadrature.hpp"
#include "hlab/transforms.hpp"

using namespace hlab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GridFunction sampled(double (*fn)(double), double L, std::size_t N) {
  return sample(PointwiseMap::line([fn](double x) { return Complex(fn(x)); }), GridSpec::uniform(1, L, N));
}

// max |a - b| over |x| <= r, relative to max |b| there
double interior_error(const GridFunction& a, const GridFunction& b, double r) {
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a.spec.node(i)[0]) > r) continue;
    err = std::max(err, std::abs(a.samples[i] - b.samples[i]));
    ref = std::max(ref, std::abs(b.samples[i]));
  }
  return err / ref;
}

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.samples[i] - b.samples[i]));
  return m;
}

double max_abs(const GridFunction& a) {
  double m = 0.0;
  for (const auto& v : a.samples) m = std::max(m, std::abs(v));
  return m;
}

GridFunction band_limited(const GridSpec& s, std::uint64_t seed) {
  // random trigonometric polynomial without the constant and Nyquist terms
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  GridFunction g(s);
  const double T = 2.0 * s.half_width[0];
  for (int k = 1; k < 20; ++k) {
    const double a = nd(rng), b = nd(rng);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = s.node(i)[0];
      g.samples[i] += a * std::cos(2 * M_PI * k * x / T) + b * std::sin(2 * M_PI * k * x / T);
    }
  }
  return g;
}

}  // namespace

TEST(Hilbert, CosineGoesToSine) {
  const double L = 3.0;
  const auto g = sample(PointwiseMap::line([L](double x) { return Complex(std::cos(M_PI * x / L)); }),
                        GridSpec::uniform(1, L, 64));
  const auto h = hilbert_axis(g, 0);
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = g.spec.node(i)[0];
    EXPECT_NEAR(h.samples[i].real(), std::sin(M_PI * x / L), 1e-10);
    EXPECT_NEAR(h.samples[i].imag(), 0.0, 1e-12);
  }
}

TEST(Hilbert, PoissonProfile) {
  const double L = 2048.0;
  const auto g = sampled([](double x) { return (1.0 / M_PI) / (1.0 + x * x); }, L, 1 << 20);
  const auto ref = sampled([](double x) { return (1.0 / M_PI) * x / (1.0 + x * x); }, L, 1 << 20);
  const auto h = hilbert_axis(g, 0);
  EXPECT_LT(interior_error(h, ref, L / 8), 5e-4);
  double imag = 0.0;
  for (const auto& v : h.samples) imag = std::max(imag, std::abs(v.imag()));
  EXPECT_LT(imag, 1e-12);
}

TEST(Hilbert, OddRational) {
  const double L = 256.0;
  const auto g = sampled([](double x) { return x / ((1.0 + x * x) * (1.0 + x * x)); }, L, 1 << 16);
  const auto ref = sampled([](double x) { return (x * x - 1.0) / (2.0 * (x * x + 1.0) * (x * x + 1.0)); }, L, 1 << 16);
  EXPECT_LT(interior_error(hilbert_axis(g, 0), ref, L / 8), 5e-4);
}

TEST(Hilbert, TwiceIsMinusIdentity) {
  const auto g = band_limited(GridSpec::uniform(1, 5.0, 256), 3);
  const auto hh = hilbert_axis(hilbert_axis(g, 0), 0);
  EXPECT_LT(max_abs_diff(hh, scale(g, -1.0)), 1e-9 * max_abs(g));
}

TEST(Hilbert, MaskIdentityAndOrder) {
  const auto f = battery::tensor({battery::odd_rational(), battery::gaussian()});
  const auto g = sample(f.f, GridSpec::uniform(2, 8.0, 128));
  const auto same = multi_hilbert(g, {false, false});
  EXPECT_EQ(same.samples, g.samples);
  const auto a = multi_hilbert(g, {true, true}, std::vector<std::size_t>{0, 1});
  const auto b = multi_hilbert(g, {true, true}, std::vector<std::size_t>{1, 0});
  EXPECT_LT(max_abs_diff(a, b), 1e-12);
  EXPECT_THROW(multi_hilbert(g, {true}), PreconditionError);
  EXPECT_THROW(multi_hilbert(g, {true, true}, std::vector<std::size_t>{0, 0}), PreconditionError);
}

TEST(Hilbert, FactorsOverTensors) {
  const auto s1 = GridSpec::uniform(1, 8.0, 128);
  const auto f = sample(battery::odd_rational().f, s1);
  const auto g = sample(battery::gaussian().f, s1);
  const auto whole = multi_hilbert(tensor_product({f, g}), {true, false});
  const auto parts = tensor_product({hilbert_axis(f, 0), g});
  EXPECT_LT(max_abs_diff(whole, parts), 1e-9);
}

TEST(StarNorm, ZeroAndTensor) {
  EXPECT_EQ(star_norm(GridFunction(GridSpec::uniform(2, 4.0, 32))), 0.0);
  const auto s1 = GridSpec::uniform(1, 64.0, 2048);
  const auto f = sample(battery::odd_rational().f, s1);
  const auto g = sample(battery::odd_gaussian().f, s1);
  const double expected = star_norm(f) * star_norm(g);
  EXPECT_NEAR(star_norm(tensor_product({f, g})), expected, 0.01 * expected);
}

TEST(StarNorm, OddRationalTermsAgainstQuadrature) {
  const auto g = sampled([](double x) { return x / ((1.0 + x * x) * (1.0 + x * x)); }, 4096.0, 1 << 20);
  const auto terms = star_terms(g);
  quad::LineOptions opt;
  opt.abs_tol = 1e-12;
  opt.rel_tol = 1e-12;
  opt.limit = 1e12;
  const std::vector<double> marks{-1.0, 0.0, 1.0};
  auto f_abs = [](double x) { return std::abs(x) / ((1.0 + x * x) * (1.0 + x * x)); };
  auto h_abs = [](double x) { return std::abs(x * x - 1.0) / (2.0 * (x * x + 1.0) * (x * x + 1.0)); };
  const double f1 = quad::integrate_line<double>(f_abs, -kInf, kInf, marks, opt).value;
  const double h1 = quad::integrate_line<double>(h_abs, -kInf, kInf, marks, opt).value;
  EXPECT_NEAR(f1, 1.0, 1e-10);
  EXPECT_NEAR(terms[0], f1, 1e-3);
  EXPECT_NEAR(terms[1], h1, 1e-3 * h1);
  EXPECT_NEAR(star_norm(g), f1 + h1, 2e-3);
}

TEST(Poisson, Semigroup) {
  const double L = 1024.0;
  const std::size_t N = 1 << 18;
  auto profile = [](double a) {
    return PointwiseMap::line([a](double x) { return Complex((1.0 / (M_PI * a)) / (1.0 + (x / a) * (x / a))); });
  };
  const auto s = GridSpec::uniform(1, L, N);
  const auto out = poisson_extend(sample(profile(0.5), s), {0.75});
  const auto ref = sample(profile(1.25), s);
  EXPECT_LT(max_abs_diff(out, ref), 1e-5 * max_abs(ref));
  EXPECT_THROW(poisson_extend(out, {0.0}), PreconditionError);
}

TEST(Poisson, ContractionAndApproximateIdentity) {
  const auto s = GridSpec::uniform(1, 32.0, 4096);
  const auto g = sample(battery::unit_indicator().f, s);
  const double n1 = lp_norm(g, 1.0);
  double previous = kInf;
  for (double y = 1.0; y > 1e-3; y /= 2.0) {
    const auto e = poisson_extend(g, {y});
    EXPECT_LE(lp_norm(real_part(e), 1.0), n1 * (1.0 + 1e-6));
    const double dist = lp_norm(subtract(e, g), 1.0);
    EXPECT_LT(dist, previous);
    previous = dist;
  }
  EXPECT_LT(previous, 0.05);
}

TEST(Bump, UnitMassAndTransform) {
  const auto b = BumpProfile::standard();
  EXPECT_NEAR(b.mass(), 1.0, 1e-10);
  EXPECT_NEAR(std::abs(b.fourier(0.0) - 1.0), 0.0, 1e-12);
  quad::Options opt;
  opt.abs_tol = 1e-15;
  opt.rel_tol = 1e-13;
  opt.max_subdivisions = 2000;
  for (double w : {0.3, 1.7, 4.25, 11.0}) {
    auto re = [&](double x) { return b(x) * std::cos(2 * M_PI * w * x); };
    const double direct = quad::adaptive<double>(re, -1.0, 1.0, opt).value;
    EXPECT_NEAR(b.fourier(w).real(), direct, 1e-11) << w;
    EXPECT_NEAR(b.fourier(w).imag(), 0.0, 1e-11) << w;
  }
}

TEST(Maximal, ConfigValidation) {
  auto cfg = MaximalConfig::standard(1);
  EXPECT_EQ(cfg.scales[0].size(), 41u);
  EXPECT_NO_THROW(cfg.validate(1));
  EXPECT_THROW(cfg.validate(2), PreconditionError);
  cfg.scales[0][3] = cfg.scales[0][2];
  EXPECT_THROW(cfg.validate(1), PreconditionError);
  MaximalConfig heavy = MaximalConfig::standard(1);
  heavy.bumps[0] = BumpProfile([](double x) { return 0.6 * (1.0 - std::abs(x)); }, 1.0);
  EXPECT_THROW(heavy.validate(1), PreconditionError);
}

TEST(Maximal, ZeroAndDomination) {
  const auto s = GridSpec::uniform(1, 16.0, 1024);
  const auto cfg = MaximalConfig::standard(1, std::pow(2.0, 0.5), -6, 4);
  EXPECT_EQ(h1_norm_maximal(GridFunction(s), cfg), 0.0);
  const auto g = sample(battery::step_pair().f, s);
  const auto m = smooth_maximal(g, cfg);
  for (double t : cfg.scales[0]) {
    const auto avg = bump_average(g, cfg, {t});
    for (std::size_t i = 0; i < g.size(); ++i) ASSERT_GE(m.samples[i].real() + 1e-14, std::abs(avg.samples[i]));
  }
}

TEST(Maximal, TwoDimensionalDomination) {
  const auto f = battery::tensor({battery::odd_rational(), battery::odd_gaussian()});
  const auto g = sample(f.f, GridSpec::uniform(2, 8.0, 64));
  const auto cfg = MaximalConfig::standard(2, 2.0, -3, 2);
  const auto m = smooth_maximal(g, cfg);
  for (double a : cfg.scales[0])
    for (double b : cfg.scales[1]) {
      const auto avg = bump_average(g, cfg, {a, b});
      for (std::size_t i = 0; i < g.size(); ++i) ASSERT_GE(m.samples[i].real() + 1e-14, std::abs(avg.samples[i]));
    }
}

TEST(Maximal, LatticeRefinementConverges) {
  const auto g = sample(battery::odd_rational().f, GridSpec::uniform(1, 256.0, 1 << 14));
  const double coarse = h1_norm_maximal(g, MaximalConfig::standard(1));
  const double fine = h1_norm_maximal(g, MaximalConfig::standard(1, std::pow(2.0, 0.125), -40, 40));
  EXPECT_GE(fine, coarse);
  EXPECT_LT(fine / coarse - 1.0, 0.01);
}

TEST(Maximal, NormEquivalenceRatioIsStable) {
  // Only the spread of the ratio across functions and grids is meaningful.
  const auto cfg = MaximalConfig::standard(1);
  std::vector<double> ratios;
  for (std::size_t N : {std::size_t{1} << 13, std::size_t{1} << 14}) {
    for (const auto& f : battery::hardy_battery(1)) {
      const auto g = sample(f.f, GridSpec::uniform(1, 128.0, N));
      const double r = h1_norm_maximal(g, cfg) / star_norm(g);
      ratios.push_back(r);
      RecordProperty(f.name + "_" + std::to_string(N), std::to_string(r));
    }
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  EXPECT_GT(*lo, 0.0);
  EXPECT_LT(*hi / *lo, 4.0);
  // refinement moves each ratio by little
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(ratios[i], ratios[i + 3], 0.02 * ratios[i]);
}
