#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace hlab {

using Complex = std::complex<double>;

// A callable R^n -> C. Optionally carries per-axis factors (when the map is a
// tensor product) and per-axis feature points: jumps, kinks, or the length scale
// where the map changes. Quadrature uses the features to place subdivisions.
class PointwiseMap {
 public:
  using Fn = std::function<Complex(std::span<const double>)>;
  using AxisFn = std::function<Complex(double)>;

  struct Axis {
    AxisFn fn;
    std::vector<double> features;
  };

  PointwiseMap() = default;

  static PointwiseMap general(std::size_t n, Fn fn, std::vector<std::vector<double>> features = {});
  static PointwiseMap separable(std::vector<Axis> axes);
  static PointwiseMap line(AxisFn fn, std::vector<double> features = {});
  static PointwiseMap zero(std::size_t n);

  std::size_t dimension() const { return state_ ? state_->dimension : 0; }
  Complex operator()(std::span<const double> x) const;
  Complex operator()(double x) const;
  bool separable() const { return state_ && !state_->axes.empty(); }
  const Axis& axis(std::size_t j) const { return state_->axes[j]; }
  std::span<const double> features(std::size_t j) const { return state_->features[j]; }

 private:
  struct State {
    std::size_t dimension = 0;
    Fn fn;
    std::vector<Axis> axes;
    std::vector<std::vector<double>> features;
  };
  std::shared_ptr<const State> state_;
};

// Tensor product of one-dimensional maps.
PointwiseMap tensor(const std::vector<PointwiseMap>& parts);
// a f + b g.
PointwiseMap combine(Complex a, const PointwiseMap& f, Complex b, const PointwiseMap& g);
PointwiseMap real_part(const PointwiseMap& f);
PointwiseMap imag_part(const PointwiseMap& f);

}  // namespace hlab
