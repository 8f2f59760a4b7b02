#pragma once

#include <cstddef>
#include <vector>

#include "hlab/kernel.hpp"
#include "hlab/pointwise.hpp"

namespace hlab {

// One axis of the signed log-radial grid: both half-lines x = -e^u and x = +e^u,
// u in [u_min, u_max] split into equal cells with `order` Gauss-Legendre nodes each.
struct LogAxis {
  double u_min = -16.0;
  double u_max = 12.0;
  std::size_t cells = 256;
  std::size_t order = 8;  // 4, 8 or 16

  std::size_t half_size() const { return cells * order; }
  double cell_width() const { return (u_max - u_min) / static_cast<double>(cells); }
};

struct LogRadialGrid {
  std::vector<LogAxis> axes;

  std::size_t dimension() const { return axes.size(); }
  std::size_t axis_size(std::size_t j) const { return 2 * axes[j].half_size(); }
  std::size_t size() const;
  // Signed coordinates along axis j: the negative half-line first (|x| increasing), then the positive one.
  std::vector<double> axis_nodes(std::size_t j) const;
  // Quadrature weights for dx along axis j in the same order.
  std::vector<double> axis_weights(std::size_t j) const;
  void validate() const;
};

struct LogRadialFunction {
  LogRadialGrid grid;
  std::vector<Complex> samples;  // row-major over axes
};

LogRadialFunction sample_log_radial(const PointwiseMap& f, const LogRadialGrid& grid);

struct FastPathOptions {
  // Largest tolerated ratio of estimated truncation leakage to output L2 norm.
  double aliasing_threshold = 1e-7;
  double weight_tolerance = 1e-14;
};

// Applies a separable Hausdorff operator axis by axis as a convolution in u = log|x|.
LogRadialFunction apply_separable_fast(const Kernel& k, const LogRadialFunction& g, const FastPathOptions& opt = {});

// L2(dx) norm over the represented region.
double log_radial_l2(const LogRadialFunction& g);
double log_radial_relative_l2(const LogRadialFunction& approx, const LogRadialFunction& reference);

}  // namespace hlab
