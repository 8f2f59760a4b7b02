#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hlab/pointwise.hpp"

namespace hlab {

// A test function with whatever closed-form transforms are known.
struct BatteryFunction {
  std::string name;
  PointwiseMap f;
  std::optional<PointwiseMap> fourier;  // int f(x) exp(-2 pi i x xi) dx
  std::optional<PointwiseMap> hilbert;  // one-dimensional members only
  bool hardy_type = false;              // f and its Hilbert transforms integrable
  std::vector<BatteryFunction> factors;  // set for tensor products
};

namespace battery {

BatteryFunction gaussian();            // exp(-pi x^2)
BatteryFunction poisson(double a = 1.0);  // (a / pi) / (x^2 + a^2)
BatteryFunction odd_rational();        // x / (1 + x^2)^2
BatteryFunction unit_indicator();      // indicator of (0, 1)
BatteryFunction odd_gaussian();        // x exp(-pi x^2)
BatteryFunction step_pair();           // indicator of (0, 1) minus indicator of (1, 2)

BatteryFunction tensor(const std::vector<BatteryFunction>& parts);
// Closed form of the Hilbert transform along axis j, when every needed factor has one.
std::optional<PointwiseMap> hilbert_along(const BatteryFunction& f, std::size_t axis);

// Gaussian, Poisson profile, odd rational, unit indicator; for n = 2 their tensor squares.
std::vector<BatteryFunction> lp_battery(std::size_t n);
// Members with integrable Hilbert transforms: odd rational, odd Gaussian, step pair.
std::vector<BatteryFunction> hardy_battery(std::size_t n);
// Random combination of the Gaussian, Poisson profile and odd rational (tensor power for n > 1).
BatteryFunction random_mix(std::uint64_t seed, std::size_t n);

}  // namespace battery
}  // namespace hlab
