#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hlab/gridfn.hpp"

namespace hlab {

// Bit j set: transform along axis j.
using AxisMask = std::vector<bool>;

// Multiplier -i sign(xi) along axis j; zero at xi = 0 and at the Nyquist bin.
GridFunction hilbert_axis(const GridFunction& g, std::size_t j);
// Applies hilbert_axis for every set bit, in `order` if given (a permutation of the axes).
GridFunction multi_hilbert(const GridFunction& g, const AxisMask& e,
                           const std::optional<std::vector<std::size_t>>& order = std::nullopt);
// Sum over all 2^n masks of the L1 norm of multi_hilbert(g, e).
double star_norm(const GridFunction& g);
// Per-mask L1 norms, indexed by the mask's bit pattern (bit j = axis j).
std::vector<double> star_terms(const GridFunction& g);

// Convolution with the unit-mass Cauchy kernel of width y_j on each axis.
GridFunction poisson_extend(const GridFunction& g, const std::vector<double>& y);

// A one-dimensional compactly supported profile with its Fourier transform tabulated.
class BumpProfile {
 public:
  // Normalized exp(-1 / (1 - x^2)) on (-1, 1).
  static BumpProfile standard();
  BumpProfile(std::function<double(double)> density, double radius);

  double operator()(double x) const;
  double radius() const { return radius_; }
  // int density(x) exp(-2 pi i x w) dx, cubic interpolation in a fine table; zero beyond the table.
  Complex fourier(double w) const;
  // Integral by adaptive quadrature.
  double mass() const;

 private:
  struct Table;
  std::function<double(double)> density_;
  double radius_;
  std::shared_ptr<const Table> table_;
};

struct MaximalConfig {
  std::vector<BumpProfile> bumps;           // one per axis
  std::vector<std::vector<double>> scales;  // per axis dilation lattice

  // rho^k for k in [k_min, k_max] on every axis with the standard bump.
  static MaximalConfig standard(std::size_t n, double rho = 1.189207115002721, int k_min = -20, int k_max = 20);
  void validate(std::size_t n) const;
};

// Max over the lattice of |g * (tensor of bumps dilated by t)|, one spectral convolution per lattice point.
GridFunction smooth_maximal(const GridFunction& g, const MaximalConfig& cfg);
double h1_norm_maximal(const GridFunction& g, const MaximalConfig& cfg);
// The single convolution for one lattice point; exposed for checking the sup.
GridFunction bump_average(const GridFunction& g, const MaximalConfig& cfg, const std::vector<double>& t);

}  // namespace hlab
