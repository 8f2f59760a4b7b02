#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hlab/gridfn.hpp"
#include "hlab/kernel.hpp"
#include "hlab/pointwise.hpp"

namespace hlab {

struct QuadConfig {
  double tolerance = 1e-10;
  std::size_t max_subdivisions = 200;
  // Integrate in s = log t (default) or directly in t.
  bool log_domain = true;
};

struct PointValue {
  Complex value;
  double error = 0.0;
  bool converged = true;
};

// int f(x / t) phi(t) / prod t dt at one point.
PointValue hausdorff_at(const Kernel& k, const PointwiseMap& f, std::span<const double> x, const QuadConfig& q);
// int f(t x) phi(t) dt at one point.
PointValue adjoint_at(const Kernel& k, const PointwiseMap& f, std::span<const double> x, const QuadConfig& q);

// One-dimensional action of the axis-j factor of a separable kernel at the given points.
std::vector<PointValue> axis_action(const Kernel& k, std::size_t axis, const PointwiseMap::Axis& f,
                                    std::span<const double> x, const QuadConfig& q, bool adjoint);

// Node-wise evaluation; throws QuadratureError for the first node that misses the tolerance.
GridFunction apply_hausdorff(const Kernel& k, const PointwiseMap& f, const GridSpec& spec, const QuadConfig& q);
GridFunction apply_adjoint(const Kernel& k, const PointwiseMap& f, const GridSpec& spec, const QuadConfig& q);

// Per-axis values of a separable operator applied to a separable map on a grid:
// entry j holds the N_j values along axis j. Their outer product is the full result.
std::vector<std::vector<Complex>> separable_axis_values(const Kernel& k, const PointwiseMap& f,
                                                        const GridSpec& spec, const QuadConfig& q, bool adjoint);

}  // namespace hlab
