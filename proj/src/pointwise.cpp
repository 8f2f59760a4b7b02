#include "hlab/pointwise.hpp"

#include <algorithm>

#include "hlab/errors.hpp"

namespace hlab {

PointwiseMap PointwiseMap::general(std::size_t n, Fn fn, std::vector<std::vector<double>> features) {
  if (n == 0) throw PreconditionError("map dimension must be positive");
  if (!fn) throw PreconditionError("map callable is empty");
  auto s = std::make_shared<State>();
  s->dimension = n;
  s->fn = std::move(fn);
  features.resize(n);
  s->features = std::move(features);
  PointwiseMap m;
  m.state_ = std::move(s);
  return m;
}

PointwiseMap PointwiseMap::separable(std::vector<Axis> axes) {
  if (axes.empty()) throw PreconditionError("separable map needs at least one axis");
  auto s = std::make_shared<State>();
  s->dimension = axes.size();
  for (const auto& a : axes) {
    if (!a.fn) throw PreconditionError("map callable is empty");
    s->features.push_back(a.features);
  }
  s->axes = std::move(axes);
  PointwiseMap m;
  m.state_ = std::move(s);
  return m;
}

PointwiseMap PointwiseMap::line(AxisFn fn, std::vector<double> features) {
  return separable({Axis{std::move(fn), std::move(features)}});
}

PointwiseMap PointwiseMap::zero(std::size_t n) {
  return separable(std::vector<Axis>(n, Axis{[](double) { return Complex{}; }, {}}));
}

Complex PointwiseMap::operator()(std::span<const double> x) const {
  if (!state_->axes.empty()) {
    Complex v = 1.0;
    for (std::size_t j = 0; j < state_->axes.size(); ++j) {
      v *= state_->axes[j].fn(x[j]);
      if (v == Complex{}) break;
    }
    return v;
  }
  return state_->fn(x);
}

Complex PointwiseMap::operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }

PointwiseMap tensor(const std::vector<PointwiseMap>& parts) {
  std::vector<PointwiseMap::Axis> axes;
  for (const auto& p : parts) {
    if (p.dimension() != 1) throw PreconditionError("tensor: every part must be one-dimensional");
    if (p.separable()) {
      axes.push_back(p.axis(0));
    } else {
      auto f = p;
      axes.push_back({[f](double x) { return f(x); }, {p.features(0).begin(), p.features(0).end()}});
    }
  }
  return PointwiseMap::separable(std::move(axes));
}

PointwiseMap combine(Complex a, const PointwiseMap& f, Complex b, const PointwiseMap& g) {
  if (f.dimension() != g.dimension()) throw PreconditionError("combine: dimension mismatch");
  const std::size_t n = f.dimension();
  std::vector<std::vector<double>> features(n);
  for (std::size_t j = 0; j < n; ++j) {
    features[j].assign(f.features(j).begin(), f.features(j).end());
    features[j].insert(features[j].end(), g.features(j).begin(), g.features(j).end());
  }
  if (n == 1) {
    return PointwiseMap::line([=](double x) { return a * f(x) + b * g(x); }, features[0]);
  }
  return PointwiseMap::general(
      n, [=](std::span<const double> x) { return a * f(x) + b * g(x); }, features);
}

namespace {
PointwiseMap project(const PointwiseMap& f, bool real) {
  const std::size_t n = f.dimension();
  std::vector<std::vector<double>> features(n);
  for (std::size_t j = 0; j < n; ++j) features[j].assign(f.features(j).begin(), f.features(j).end());
  auto pick = [real](Complex v) { return Complex(real ? v.real() : v.imag(), 0.0); };
  if (n == 1) return PointwiseMap::line([=](double x) { return pick(f(x)); }, features[0]);
  return PointwiseMap::general(n, [=](std::span<const double> x) { return pick(f(x)); }, features);
}
}  // namespace

PointwiseMap real_part(const PointwiseMap& f) { return project(f, true); }
PointwiseMap imag_part(const PointwiseMap& f) { return project(f, false); }

}  // namespace hlab
