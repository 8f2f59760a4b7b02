#include "hlab/battery.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "hlab/errors.hpp"

namespace hlab::battery {

namespace {

constexpr double pi = std::numbers::pi;

// exp(-i pi xi) sin(pi xi) / (pi xi): transform of the unit indicator.
Complex indicator_hat(double xi) {
  const double a = pi * xi;
  const double sinc = std::abs(a) < 1e-8 ? 1.0 - a * a / 6.0 : std::sin(a) / a;
  return std::polar(sinc, -a);
}

}  // namespace

BatteryFunction gaussian() {
  BatteryFunction b;
  b.name = "gaussian";
  b.f = PointwiseMap::line([](double x) { return Complex(std::exp(-pi * x * x)); }, {-1.0, 1.0});
  b.fourier = b.f;
  return b;
}

BatteryFunction poisson(double a) {
  if (!(a > 0.0)) throw PreconditionError("poisson profile width must be positive");
  BatteryFunction b;
  b.name = "poisson";
  b.f = PointwiseMap::line([a](double x) { return Complex(a / (pi * (x * x + a * a))); }, {-a, a});
  b.fourier = PointwiseMap::line([a](double xi) { return Complex(std::exp(-2.0 * pi * a * std::abs(xi))); },
                                 {-1.0 / a, 1.0 / a});
  b.hilbert = PointwiseMap::line([a](double x) { return Complex(x / (pi * (x * x + a * a))); }, {-a, a});
  return b;
}

BatteryFunction odd_rational() {
  BatteryFunction b;
  b.name = "odd_rational";
  b.f = PointwiseMap::line(
      [](double x) {
        const double d = 1.0 + x * x;
        return Complex(x / (d * d));
      },
      {-1.0, 1.0});
  b.fourier = PointwiseMap::line(
      [](double xi) { return Complex(0.0, -pi * pi * xi * std::exp(-2.0 * pi * std::abs(xi))); }, {-1.0, 1.0});
  b.hilbert = PointwiseMap::line(
      [](double x) {
        const double d = 1.0 + x * x;
        return Complex((x * x - 1.0) / (2.0 * d * d));
      },
      {-1.0, 1.0});
  b.hardy_type = true;
  return b;
}

BatteryFunction unit_indicator() {
  BatteryFunction b;
  b.name = "unit_indicator";
  b.f = PointwiseMap::line([](double x) { return Complex(x > 0.0 && x < 1.0 ? 1.0 : 0.0); }, {1.0});
  b.fourier = PointwiseMap::line(indicator_hat, {-1.0, 1.0});
  b.hilbert = PointwiseMap::line(
      [](double x) { return Complex(std::log(std::abs(x / (x - 1.0))) / pi); }, {1.0});
  return b;
}

BatteryFunction odd_gaussian() {
  BatteryFunction b;
  b.name = "odd_gaussian";
  b.f = PointwiseMap::line([](double x) { return Complex(x * std::exp(-pi * x * x)); }, {-1.0, 1.0});
  b.fourier = PointwiseMap::line([](double xi) { return Complex(0.0, -xi * std::exp(-pi * xi * xi)); }, {-1.0, 1.0});
  b.hardy_type = true;
  return b;
}

BatteryFunction step_pair() {
  BatteryFunction b;
  b.name = "step_pair";
  b.f = PointwiseMap::line(
      [](double x) {
        if (x > 0.0 && x < 1.0) return Complex(1.0);
        if (x > 1.0 && x < 2.0) return Complex(-1.0);
        return Complex(0.0);
      },
      {1.0, 2.0});
  b.fourier = PointwiseMap::line(
      [](double xi) { return indicator_hat(xi) * (1.0 - std::polar(1.0, -2.0 * pi * xi)); }, {-1.0, 1.0});
  b.hilbert = PointwiseMap::line(
      [](double x) { return Complex(std::log(std::abs(x * (x - 2.0) / ((x - 1.0) * (x - 1.0)))) / pi); },
      {1.0, 2.0});
  b.hardy_type = true;
  return b;
}

BatteryFunction tensor(const std::vector<BatteryFunction>& parts) {
  if (parts.empty()) throw PreconditionError("battery tensor needs parts");
  BatteryFunction b;
  std::vector<PointwiseMap> fs, hats;
  bool all_hats = true;
  b.hardy_type = true;
  for (const auto& p : parts) {
    if (p.f.dimension() != 1) throw PreconditionError("battery tensor parts must be one-dimensional");
    b.name += (b.name.empty() ? "" : "*") + p.name;
    fs.push_back(p.f);
    if (p.fourier)
      hats.push_back(*p.fourier);
    else
      all_hats = false;
    b.hardy_type = b.hardy_type && p.hardy_type;
  }
  b.f = hlab::tensor(fs);
  if (all_hats) b.fourier = hlab::tensor(hats);
  b.factors = parts;
  return b;
}

std::optional<PointwiseMap> hilbert_along(const BatteryFunction& f, std::size_t axis) {
  if (f.factors.empty()) {
    if (axis != 0) return std::nullopt;
    return f.hilbert;
  }
  if (axis >= f.factors.size() || !f.factors[axis].hilbert) return std::nullopt;
  std::vector<PointwiseMap> parts;
  for (std::size_t j = 0; j < f.factors.size(); ++j) parts.push_back(j == axis ? *f.factors[j].hilbert : f.factors[j].f);
  return hlab::tensor(parts);
}

std::vector<BatteryFunction> lp_battery(std::size_t n) {
  std::vector<BatteryFunction> base{gaussian(), poisson(), odd_rational(), unit_indicator()};
  if (n == 1) return base;
  std::vector<BatteryFunction> out;
  for (const auto& b : base) out.push_back(tensor(std::vector<BatteryFunction>(n, b)));
  return out;
}

std::vector<BatteryFunction> hardy_battery(std::size_t n) {
  std::vector<BatteryFunction> base{odd_rational(), odd_gaussian(), step_pair()};
  if (n == 1) return base;
  std::vector<BatteryFunction> out;
  for (const auto& b : base) out.push_back(tensor(std::vector<BatteryFunction>(n, b)));
  return out;
}

BatteryFunction random_mix(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  const std::vector<BatteryFunction> parts{gaussian(), poisson(), odd_rational()};
  BatteryFunction mix;
  mix.name = "mix" + std::to_string(seed);
  bool first = true;
  for (const auto& p : parts) {
    const double c = nd(rng);
    if (first) {
      mix.f = combine(c, p.f, 0.0, p.f);
      mix.fourier = combine(c, *p.fourier, 0.0, *p.fourier);
      mix.hilbert = std::nullopt;
      first = false;
    } else {
      mix.f = combine(1.0, mix.f, c, p.f);
      mix.fourier = combine(1.0, *mix.fourier, c, *p.fourier);
    }
  }
  if (n == 1) return mix;
  return tensor(std::vector<BatteryFunction>(n, mix));
}

}  // namespace hlab::battery
