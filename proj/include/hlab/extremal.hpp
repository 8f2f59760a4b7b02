#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hlab/gridfn.hpp"
#include "hlab/hausdorff.hpp"
#include "hlab/kernel.hpp"
#include "hlab/pointwise.hpp"
#include "hlab/report.hpp"

namespace hlab {

struct SweepEntry {
  double epsilon = 0.0;
  double ratio = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double diagnostics = 0.0;  // absolute error estimate attached to ratio
};

struct SweepResult {
  std::vector<SweepEntry> entries;  // epsilon strictly decreasing
  double extrapolated = 0.0;
  double target = 0.0;
  bool converged = false;
  std::vector<std::string> notes;
};

struct LpExtremal {
  PointwiseMap f;
  double norm = 0.0;  // exact L^p norm
};

// prod |x_j|^(-1/p - eps) on {|x_j| >= 1}.
LpExtremal lp_extremal(double epsilon, double p, std::size_t n);

struct LpSweepOptions {
  double radius_power = 2.0;  // outer cutoff R = (1/eps)^radius_power
  double tolerance = 1e-11;
  double slack = 0.02;  // allowed excess over the target
};

SweepResult lp_lower_bound_sweep(const Kernel& k, double p, std::span<const double> eps_schedule,
                                 const LpSweepOptions& opt = {});

// Fit r(eps) = T + a eps log(1/eps) through the two smallest eps and return T.
double extrapolate_eps_log(std::span<const double> eps, std::span<const double> ratio);

// prod (x_j^2 + 1)^(-(1+eps)/2) exp(-i (1+eps) arg(x_j + i)), arg in (0, pi).
PointwiseMap h1_extremal(double epsilon, std::size_t n);

struct H1SweepOptions {
  double half_width = 512.0;
  std::size_t points = std::size_t{1} << 16;
  QuadConfig quad{1e-9, 400, true};

  // n = 1: L = 512, N = 2^16. n = 2: L = 64, N = 2^10 per axis.
  static H1SweepOptions for_dimension(std::size_t n);
};

// Residual ratio of the truncated kernel against its mass times identity, measured in the star norm.
SweepResult h1_lower_bound_sweep(const Kernel& k, double delta, std::span<const double> eps_schedule,
                                 const H1SweepOptions& opt);

struct WitnessOptions {
  double half_width = 64.0;
  std::size_t points = 8192;
  QuadConfig quad{1e-11, 400, true};

  static WitnessOptions for_dimension(std::size_t n);
};

// lhs: grid integral over the positive orthant of H(f x ... x f), f(x) = x / (1 + x^2)^2.
// rhs: 2^-n times the kernel mass.
std::pair<double, double> necessary_condition_witness(const Kernel& k, const WitnessOptions& opt);

// Dilates g by the integer m (same samples on an m-times wider grid) and compares
// the L1 and star norms with m^n times the originals.
std::vector<CheckReport> scaling_check(const GridFunction& g, long m);

// One row per entry, then a closing row at epsilon = 0 holding the extrapolated limit.
void write_sweep_csv(const SweepResult& r, const std::filesystem::path& path);

}  // namespace hlab
