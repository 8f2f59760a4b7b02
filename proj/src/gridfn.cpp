#include "hlab/gridfn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

#include "fft.hpp"
#include "hlab/errors.hpp"
#include "hlab/parallel.hpp"

namespace hlab {

namespace {

// Compensated summation, fixed order.
class Accumulator {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double offset_of(Centering c) { return c == Centering::cell ? 0.5 : 0.0; }

// Multiplies every sample by prod_j factors[j][k_j].
void apply_axis_factors(std::vector<Complex>& data, const std::vector<std::size_t>& dims,
                        const std::vector<std::vector<Complex>>& factors) {
  const std::size_t n = dims.size();
  if (n == 1) {
    for (std::size_t k = 0; k < data.size(); ++k) data[k] *= factors[0][k];
    return;
  }
  std::size_t inner = dims[n - 1];
  const std::size_t rows = data.size() / inner;
  parallel_for(rows, [&](std::size_t row) {
    std::size_t rest = row;
    Complex prefix = 1.0;
    for (std::size_t j = n - 1; j-- > 0;) {
      prefix *= factors[j][rest % dims[j]];
      rest /= dims[j];
    }
    Complex* p = data.data() + row * inner;
    for (std::size_t k = 0; k < inner; ++k) p[k] *= prefix * factors[n - 1][k];
  });
}

void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (!(a.spec == b.spec)) throw PreconditionError("grid functions live on different grids");
}

template <class T>
void put(std::ofstream& os, T v) {
  static_assert(sizeof(T) == 8);
  unsigned char bytes[8];
  std::memcpy(bytes, &v, 8);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + 8);
  os.write(reinterpret_cast<const char*>(bytes), 8);
}

template <class T>
T get(std::ifstream& is) {
  unsigned char bytes[8];
  if (!is.read(reinterpret_cast<char*>(bytes), 8)) throw Error("grid file truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + 8);
  T v;
  std::memcpy(&v, bytes, 8);
  return v;
}

}  // namespace

GridSpec GridSpec::uniform(std::size_t n, double L, std::size_t N, Centering c) {
  GridSpec s{std::vector<double>(n, L), std::vector<std::size_t>(n, N), c};
  s.validate();
  return s;
}

std::size_t GridSpec::size() const {
  std::size_t total = 1;
  for (auto N : points) total *= N;
  return total;
}

double GridSpec::coordinate(std::size_t j, std::size_t k) const {
  return -half_width[j] + (static_cast<double>(k) + offset_of(centering)) * spacing(j);
}

std::vector<double> GridSpec::axis_coordinates(std::size_t j) const {
  std::vector<double> x(points[j]);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = coordinate(j, k);
  return x;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (std::size_t j = 0; j < dimension(); ++j) v *= spacing(j);
  return v;
}

GridSpec GridSpec::dual() const {
  GridSpec d;
  d.points = points;
  d.centering = Centering::node;
  for (std::size_t j = 0; j < dimension(); ++j)
    d.half_width.push_back(static_cast<double>(points[j]) / (4.0 * half_width[j]));
  return d;
}

std::vector<std::size_t> GridSpec::unflatten(std::size_t flat) const {
  std::vector<std::size_t> idx(dimension());
  for (std::size_t j = dimension(); j-- > 0;) {
    idx[j] = flat % points[j];
    flat /= points[j];
  }
  return idx;
}

std::vector<double> GridSpec::node(std::size_t flat) const {
  const auto idx = unflatten(flat);
  std::vector<double> x(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) x[j] = coordinate(j, idx[j]);
  return x;
}

void GridSpec::validate() const {
  if (points.empty()) throw PreconditionError("grid must have at least one axis");
  if (half_width.size() != points.size()) throw PreconditionError("grid: L and N have different lengths");
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (points[j] == 0 || points[j] % 2 != 0) throw PreconditionError("grid: N must be positive and even");
    if (!(std::isfinite(half_width[j]) && half_width[j] > 0.0))
      throw PreconditionError("grid: L must be positive");
  }
}

GridFunction::GridFunction(GridSpec s, std::vector<Complex> v) : spec(std::move(s)), samples(std::move(v)) {
  spec.validate();
  if (samples.size() != spec.size()) throw PreconditionError("grid function: sample count mismatch");
}

GridFunction::GridFunction(GridSpec s) : spec(std::move(s)) {
  spec.validate();
  samples.assign(spec.size(), Complex{});
}

GridFunction sample(const PointwiseMap& f, const GridSpec& spec) {
  spec.validate();
  if (f.dimension() != spec.dimension()) throw PreconditionError("sample: map and grid dimensions differ");
  GridFunction g(spec);
  const std::size_t n = spec.dimension();
  if (f.separable()) {
    std::vector<std::vector<Complex>> axes(n);
    for (std::size_t j = 0; j < n; ++j) {
      axes[j].resize(spec.points[j]);
      for (std::size_t k = 0; k < spec.points[j]; ++k) {
        const double x = spec.coordinate(j, k);
        axes[j][k] = f.axis(j).fn(x);
        if (!std::isfinite(axes[j][k].real()) || !std::isfinite(axes[j][k].imag())) {
          std::vector<double> node(n, 0.0);
          node[j] = x;
          throw NonFiniteSample(node, axes[j][k]);
        }
      }
    }
    std::fill(g.samples.begin(), g.samples.end(), Complex(1.0));
    apply_axis_factors(g.samples, spec.points, axes);
    return g;
  }
  parallel_for(g.size(), [&](std::size_t i) {
    const auto x = spec.node(i);
    const Complex v = f(x);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NonFiniteSample(x, v);
    g.samples[i] = v;
  });
  return g;
}

double lp_norm(const GridFunction& g, double p) {
  if (!(p >= 1.0)) throw PreconditionError("lp_norm: p must be at least 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : g.samples) m = std::max(m, std::abs(v));
    return m;
  }
  Accumulator acc;
  if (p == 1.0) {
    for (const auto& v : g.samples) acc.add(std::abs(v));
  } else if (p == 2.0) {
    for (const auto& v : g.samples) acc.add(std::norm(v));
  } else {
    for (const auto& v : g.samples) acc.add(std::pow(std::abs(v), p));
  }
  const double total = acc.value() * g.spec.cell_volume();
  if (p == 1.0) return total;
  if (p == 2.0) return std::sqrt(total);
  return std::pow(total, 1.0 / p);
}

GridFunction tensor_product(const std::vector<GridFunction>& parts) {
  if (parts.empty()) throw PreconditionError("tensor_product: no parts");
  GridSpec spec;
  spec.centering = parts.front().spec.centering;
  std::vector<std::vector<Complex>> axes;
  for (const auto& p : parts) {
    if (p.spec.dimension() != 1) throw PreconditionError("tensor_product: parts must be one-dimensional");
    if (p.spec.centering != spec.centering) throw PreconditionError("tensor_product: mixed centering");
    spec.half_width.push_back(p.spec.half_width[0]);
    spec.points.push_back(p.spec.points[0]);
    axes.push_back(p.samples);
  }
  GridFunction g(spec, std::vector<Complex>(spec.size(), Complex(1.0)));
  apply_axis_factors(g.samples, spec.points, axes);
  return g;
}

GridFunction outer_product(const GridSpec& spec, const std::vector<std::vector<Complex>>& axes) {
  if (axes.size() != spec.dimension()) throw PreconditionError("outer_product: axis count mismatch");
  for (std::size_t j = 0; j < axes.size(); ++j)
    if (axes[j].size() != spec.points[j]) throw PreconditionError("outer_product: axis length mismatch");
  GridFunction g(spec, std::vector<Complex>(spec.size(), Complex(1.0)));
  apply_axis_factors(g.samples, spec.points, axes);
  return g;
}

GridFunction fourier(const GridFunction& g) {
  const GridSpec& s = g.spec;
  const std::size_t n = s.dimension();
  const double c = offset_of(s.centering);
  std::vector<std::vector<Complex>> pre(n), post(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t N = s.points[j];
    const double h = s.spacing(j);
    pre[j].resize(N);
    post[j].resize(N);
    for (std::size_t k = 0; k < N; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      pre[j][k] = sign;
      const double mu = static_cast<double>(k) - static_cast<double>(N / 2);
      const double angle = -2.0 * std::numbers::pi * c * mu / static_cast<double>(N);
      const double parity = ((k + N / 2) % 2 == 0) ? 1.0 : -1.0;
      post[j][k] = h * parity * std::polar(1.0, angle);
    }
  }
  GridFunction out(s.dual(), g.samples);
  apply_axis_factors(out.samples, s.points, pre);
  detail::fft_all_axes(out.samples, s.points, -1);
  apply_axis_factors(out.samples, s.points, post);
  return out;
}

GridFunction inverse_fourier(const GridFunction& g_hat, Centering target) {
  const GridSpec& d = g_hat.spec;
  const std::size_t n = d.dimension();
  const double c = offset_of(target);
  GridSpec s;
  s.points = d.points;
  s.centering = target;
  for (std::size_t j = 0; j < n; ++j)
    s.half_width.push_back(static_cast<double>(d.points[j]) / (4.0 * d.half_width[j]));
  std::vector<std::vector<Complex>> pre(n), post(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t N = d.points[j];
    const double h_dual = d.spacing(j);
    pre[j].resize(N);
    post[j].resize(N);
    for (std::size_t k = 0; k < N; ++k) {
      const double mu = static_cast<double>(k) - static_cast<double>(N / 2);
      const double angle = 2.0 * std::numbers::pi * c * mu / static_cast<double>(N);
      const double parity = ((k + N / 2) % 2 == 0) ? 1.0 : -1.0;
      pre[j][k] = parity * std::polar(1.0, angle);
      post[j][k] = h_dual * ((k % 2 == 0) ? 1.0 : -1.0);
    }
  }
  GridFunction out(s, g_hat.samples);
  apply_axis_factors(out.samples, d.points, pre);
  detail::fft_all_axes(out.samples, d.points, +1);
  apply_axis_factors(out.samples, d.points, post);
  return out;
}

GridFunction add(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a, b);
  GridFunction out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += b.samples[i];
  return out;
}

GridFunction subtract(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a, b);
  GridFunction out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] -= b.samples[i];
  return out;
}

GridFunction scale(const GridFunction& a, Complex c) {
  GridFunction out = a;
  for (auto& v : out.samples) v *= c;
  return out;
}

GridFunction real_part(const GridFunction& g) {
  GridFunction out = g;
  for (auto& v : out.samples) v = Complex(v.real(), 0.0);
  return out;
}

GridFunction imag_part(const GridFunction& g) {
  GridFunction out = g;
  for (auto& v : out.samples) v = Complex(v.imag(), 0.0);
  return out;
}

Complex pairing(const GridFunction& a, const GridFunction& b) {
  require_same_grid(a, b);
  Accumulator re, im;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Complex v = a.samples[i] * b.samples[i];
    re.add(v.real());
    im.add(v.imag());
  }
  return Complex(re.value(), im.value()) * a.spec.cell_volume();
}

void write_grid_function(const GridFunction& g, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  const std::size_t n = g.spec.dimension();
  put<std::uint64_t>(os, n);
  for (auto N : g.spec.points) put<std::uint64_t>(os, N);
  for (double L : g.spec.half_width) put<double>(os, L);
  put<std::uint64_t>(os, g.spec.centering == Centering::node ? 1u : 0u);
  for (const auto& v : g.samples) {
    put<double>(os, v.real());
    put<double>(os, v.imag());
  }
  if (!os) throw Error("write failed for " + path.string());
}

GridFunction read_grid_function(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  const auto n = get<std::uint64_t>(is);
  if (n == 0 || n > 16) throw Error("grid file has implausible dimension");
  GridSpec s;
  for (std::uint64_t j = 0; j < n; ++j) s.points.push_back(get<std::uint64_t>(is));
  for (std::uint64_t j = 0; j < n; ++j) s.half_width.push_back(get<double>(is));
  const auto flags = get<std::uint64_t>(is);
  s.centering = (flags & 1u) ? Centering::node : Centering::cell;
  s.validate();
  std::vector<Complex> v(s.size());
  for (auto& z : v) {
    const double re = get<double>(is);
    const double im = get<double>(is);
    z = Complex(re, im);
  }
  return GridFunction(s, std::move(v));
}

InterpolatedMap::InterpolatedMap(GridFunction g) : grid_(std::make_shared<const GridFunction>(std::move(g))) {
  const GridSpec& s = grid_->spec;
  const std::size_t n = s.dimension();
  double worst = 0.0;
  for (std::size_t i = 0; i < grid_->size(); ++i) {
    const auto idx = s.unflatten(i);
    double local = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (idx[j] == 0 || idx[j] + 1 >= s.points[j]) continue;
      std::size_t stride = 1;
      for (std::size_t m = j + 1; m < n; ++m) stride *= s.points[m];
      const Complex d2 = grid_->samples[i + stride] - 2.0 * grid_->samples[i] + grid_->samples[i - stride];
      local += std::abs(d2) / 8.0;
    }
    worst = std::max(worst, local);
  }
  error_ = worst;
}

Complex InterpolatedMap::operator()(std::span<const double> x) const {
  const GridSpec& s = grid_->spec;
  const std::size_t n = s.dimension();
  std::vector<std::size_t> base(n);
  std::vector<double> frac(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double u = (x[j] - s.coordinate(j, 0)) / s.spacing(j);
    const double top = static_cast<double>(s.points[j] - 1);
    if (!(u >= 0.0 && u <= top)) return Complex{};
    const double fl = std::min(std::floor(u), top - 1.0);
    base[j] = static_cast<std::size_t>(fl);
    frac[j] = u - fl;
  }
  Complex total{};
  for (std::size_t corner = 0; corner < (std::size_t{1} << n); ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const bool up = (corner >> (n - 1 - j)) & 1u;
      w *= up ? frac[j] : 1.0 - frac[j];
      flat = flat * s.points[j] + base[j] + (up ? 1 : 0);
    }
    if (w != 0.0) total += w * grid_->samples[flat];
  }
  return total;
}

PointwiseMap InterpolatedMap::as_map() const {
  const InterpolatedMap self = *this;
  const std::size_t n = grid_->spec.dimension();
  std::vector<std::vector<double>> features(n);
  for (std::size_t j = 0; j < n; ++j) features[j] = {-grid_->spec.half_width[j], grid_->spec.half_width[j]};
  if (n == 1) return PointwiseMap::line([self](double x) { return self(std::span<const double>(&x, 1)); }, features[0]);
  return PointwiseMap::general(n, [self](std::span<const double> x) { return self(x); }, features);
}

}  // namespace hlab
