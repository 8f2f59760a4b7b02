#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "hlab/pointwise.hpp"

namespace hlab {

// cell: x_k = -L + (k + 1/2) h, never hits 0 for even N.
// node: x_k = -L + k h; used for frequency grids.
enum class Centering { cell, node };

struct GridSpec {
  std::vector<double> half_width;
  std::vector<std::size_t> points;
  Centering centering = Centering::cell;

  static GridSpec uniform(std::size_t n, double L, std::size_t N, Centering c = Centering::cell);

  std::size_t dimension() const { return points.size(); }
  std::size_t size() const;
  double spacing(std::size_t j) const { return 2.0 * half_width[j] / static_cast<double>(points[j]); }
  double coordinate(std::size_t j, std::size_t k) const;
  std::vector<double> axis_coordinates(std::size_t j) const;
  double cell_volume() const;
  // Grid of the discrete Fourier bridge: xi_m = m / (2L), m = -N/2 .. N/2-1.
  GridSpec dual() const;
  // Multi-index of flat (row-major) offset.
  std::vector<std::size_t> unflatten(std::size_t flat) const;
  std::vector<double> node(std::size_t flat) const;
  void validate() const;
  bool operator==(const GridSpec&) const = default;
};

struct GridFunction {
  GridSpec spec;
  std::vector<Complex> samples;

  GridFunction() = default;
  GridFunction(GridSpec s, std::vector<Complex> v);
  explicit GridFunction(GridSpec s);

  std::size_t size() const { return samples.size(); }
};

GridFunction sample(const PointwiseMap& f, const GridSpec& spec);
double lp_norm(const GridFunction& g, double p);
GridFunction tensor_product(const std::vector<GridFunction>& parts);
// Samples prod_j axes[j][k_j] on spec.
GridFunction outer_product(const GridSpec& spec, const std::vector<std::vector<Complex>>& axes);

// Approximates the continuous transform int g(x) exp(-2 pi i x xi) dx on spec.dual().
GridFunction fourier(const GridFunction& g);
// Inverse of fourier; the spatial centering of the result is given explicitly.
GridFunction inverse_fourier(const GridFunction& g_hat, Centering target = Centering::cell);

GridFunction add(const GridFunction& a, const GridFunction& b);
GridFunction subtract(const GridFunction& a, const GridFunction& b);
GridFunction scale(const GridFunction& a, Complex c);
GridFunction real_part(const GridFunction& g);
GridFunction imag_part(const GridFunction& g);
// Discrete sum of a(x) b(x) over nodes times the cell volume (bilinear, no conjugation).
Complex pairing(const GridFunction& a, const GridFunction& b);

// Little-endian binary layout: n, N_j, L_j, a flags word (bit 0 = node
// centering), then interleaved real/imaginary samples.
void write_grid_function(const GridFunction& g, const std::filesystem::path& path);
GridFunction read_grid_function(const std::filesystem::path& path);

// Multilinear interpolation of grid samples, zero outside the node hull.
class InterpolatedMap {
 public:
  explicit InterpolatedMap(GridFunction g);
  Complex operator()(std::span<const double> x) const;
  PointwiseMap as_map() const;
  // Per-cell bound h^2/8 |f''| estimated from second differences, maximized over nodes.
  double error_estimate() const { return error_; }

 private:
  std::shared_ptr<const GridFunction> grid_;
  double error_ = 0.0;
};

}  // namespace hlab
