#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hlab/battery.hpp"
#include "hlab/gridfn.hpp"
#include "hlab/hausdorff.hpp"
#include "hlab/kernel.hpp"
#include "hlab/report.hpp"

namespace hlab {

// All residuals are |X - Y| / (1 + |Y|); the plain relative value goes into the context.
// Separable kernels acting on tensor-product maps are handled axis by axis: grid sums,
// norms and transforms of tensors factor exactly, so no n-dimensional array is formed.

CheckReport check_duality(const Kernel& k, const PointwiseMap& f, const PointwiseMap& g, const GridSpec& spec,
                          double tolerance, const QuadConfig& q = {});

// Compares fourier(H f) with the adjoint applied to the transform of f on |xi_j| <= N_j / (8 L_j).
// Uses the closed-form transform when the battery member has one, interpolation otherwise.
CheckReport check_fourier_commutation(const Kernel& k, const BatteryFunction& f, const GridSpec& spec,
                                      double tolerance, const QuadConfig& q = {});

// Compares the spectral Hilbert transform along `axis` of H f with H applied to the
// Hilbert transform of f (closed form when known, interpolated spectral values otherwise).
CheckReport check_hilbert_commutation(const Kernel& k, const BatteryFunction& f, std::size_t axis,
                                      const GridSpec& spec, double tolerance, const QuadConfig& q = {});

enum class NormKind { lp, star };

// One report per battery member; residual = max(0, ratio - target) / target.
std::vector<CheckReport> check_upper_bound(const Kernel& k, double p, const std::vector<BatteryFunction>& battery,
                                           NormKind kind, const GridSpec& spec, double tolerance,
                                           const QuadConfig& q = {});

// sup |H f| / sup |f| against the moment of order one, the bound for bounded functions.
CheckReport check_sup_norm(const Kernel& k, const std::vector<BatteryFunction>& battery, const GridSpec& spec,
                           double tolerance, const QuadConfig& q = {});

// Quadrature settings for one operator: direct t integration for the adjoint of a
// compactly supported kernel, which avoids the long logarithmic tail.
QuadConfig quad_for(const Kernel& k, QuadConfig q, bool adjoint);

}  // namespace hlab
