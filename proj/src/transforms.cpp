#include "hlab/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fft.hpp"
#include "hlab/errors.hpp"
#include "hlab/parallel.hpp"
#include "hlab/quadrature.hpp"

namespace hlab {

namespace {

// Frequencies of the DFT bins along axis j, in cycles per unit length.
std::vector<double> bin_frequencies(const GridSpec& s, std::size_t j) {
  const std::size_t N = s.points[j];
  std::vector<double> xi(N);
  for (std::size_t m = 0; m < N; ++m)
    xi[m] = static_cast<double>(detail::signed_bin(m, N)) / (2.0 * s.half_width[j]);
  return xi;
}

void multiply_axis(std::vector<Complex>& data, const GridSpec& s, std::size_t j, const std::vector<Complex>& mult) {
  std::size_t inner = 1;
  for (std::size_t i = j + 1; i < s.dimension(); ++i) inner *= s.points[i];
  const std::size_t len = s.points[j];
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= mult[(i / inner) % len];
}

// Transform along axis j, scale bins by mult, transform back.
void axis_multiplier(std::vector<Complex>& data, const GridSpec& s, std::size_t j, std::vector<Complex> mult) {
  const std::size_t N = s.points[j];
  for (auto& m : mult) m /= static_cast<double>(N);
  detail::fft_one_axis(data, s.points, j, -1);
  multiply_axis(data, s, j, mult);
  detail::fft_one_axis(data, s.points, j, +1);
}

std::vector<Complex> hilbert_multiplier(std::size_t N) {
  std::vector<Complex> m(N, Complex{});
  for (std::size_t k = 1; k < N; ++k) {
    if (2 * k == N) continue;
    m[k] = detail::signed_bin(k, N) > 0 ? Complex(0.0, -1.0) : Complex(0.0, 1.0);
  }
  return m;
}

}  // namespace

GridFunction hilbert_axis(const GridFunction& g, std::size_t j) {
  g.spec.validate();
  if (j >= g.spec.dimension()) throw PreconditionError("hilbert_axis: axis out of range");
  GridFunction out = g;
  axis_multiplier(out.samples, g.spec, j, hilbert_multiplier(g.spec.points[j]));
  return out;
}

GridFunction multi_hilbert(const GridFunction& g, const AxisMask& e, const std::optional<std::vector<std::size_t>>& order) {
  const std::size_t n = g.spec.dimension();
  if (e.size() != n) throw PreconditionError("multi_hilbert: mask length must equal the dimension");
  std::vector<std::size_t> axes(n);
  std::iota(axes.begin(), axes.end(), 0);
  if (order) {
    std::vector<std::size_t> sorted = *order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != axes) throw PreconditionError("multi_hilbert: order must be a permutation of the axes");
    axes = *order;
  }
  GridFunction out = g;
  for (std::size_t j : axes)
    if (e[j]) out = hilbert_axis(out, j);
  return out;
}

std::vector<double> star_terms(const GridFunction& g) {
  const std::size_t n = g.spec.dimension();
  const std::size_t masks = std::size_t{1} << n;
  std::vector<double> terms(masks);
  parallel_for(masks, [&](std::size_t bits) {
    AxisMask e(n);
    for (std::size_t j = 0; j < n; ++j) e[j] = (bits >> j) & 1u;
    terms[bits] = lp_norm(multi_hilbert(g, e), 1.0);
  });
  return terms;
}

double star_norm(const GridFunction& g) {
  const auto t = star_terms(g);
  return std::accumulate(t.begin(), t.end(), 0.0);
}

GridFunction poisson_extend(const GridFunction& g, const std::vector<double>& y) {
  g.spec.validate();
  const std::size_t n = g.spec.dimension();
  if (y.size() != n) throw PreconditionError("poisson_extend: one height per axis required");
  for (double v : y)
    if (!(v > 0.0) || !std::isfinite(v)) throw PreconditionError("poisson_extend: heights must be positive");
  GridFunction out = g;
  for (std::size_t j = 0; j < n; ++j) {
    const auto xi = bin_frequencies(g.spec, j);
    std::vector<Complex> m(xi.size());
    for (std::size_t k = 0; k < xi.size(); ++k) m[k] = std::exp(-2.0 * M_PI * y[j] * std::abs(xi[k]));
    axis_multiplier(out.samples, g.spec, j, m);
  }
  return out;
}

// ---- bump profile ----

struct BumpProfile::Table {
  double step = 0.0;           // frequency spacing
  std::vector<Complex> values;  // frequencies -half..half-1 times step
};

namespace {

constexpr std::size_t kTableLength = std::size_t{1} << 18;
constexpr std::size_t kSamplesPerRadius = 512;

}  // namespace

BumpProfile BumpProfile::standard() {
  auto raw = [](double x) { return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; };
  quad::Options opt;
  opt.abs_tol = 1e-16;
  opt.rel_tol = 1e-14;
  const double mass = quad::adaptive<double>(raw, -1.0, 1.0, opt).value;
  return BumpProfile([raw, mass](double x) { return raw(x) / mass; }, 1.0);
}

BumpProfile::BumpProfile(std::function<double(double)> density, double radius)
    : density_(std::move(density)), radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw PreconditionError("bump radius must be positive");
  // Trapezoid sums of a smooth compactly supported profile are spectrally accurate.
  const double d = radius / static_cast<double>(kSamplesPerRadius);
  const std::size_t count = 2 * kSamplesPerRadius + 1;
  const std::size_t P = kTableLength;
  std::vector<Complex> buf(P, Complex{});
  for (std::size_t k = 0; k < count; ++k) buf[k] = density_(-radius + static_cast<double>(k) * d) * d;
  const std::size_t dims[1] = {P};
  detail::fft_all_axes(buf, dims, -1);
  auto table = std::make_shared<Table>();
  table->step = 1.0 / (static_cast<double>(P) * d);
  table->values.resize(P);
  for (std::size_t m = 0; m < P; ++m) {
    const long s = detail::signed_bin(m, P);
    const double w = static_cast<double>(s) * table->step;
    // samples start at -radius
    table->values[static_cast<std::size_t>(s + static_cast<long>(P / 2))] =
        buf[m] * std::exp(Complex(0.0, 2.0 * M_PI * radius * w));
  }
  table_ = std::move(table);
}

double BumpProfile::operator()(double x) const { return std::abs(x) < radius_ ? density_(x) : 0.0; }

Complex BumpProfile::fourier(double w) const {
  const auto& t = *table_;
  const double pos = w / t.step + static_cast<double>(t.values.size() / 2);
  const long base = static_cast<long>(std::floor(pos)) - 1;
  if (base < 0 || base + 3 >= static_cast<long>(t.values.size())) return Complex{};
  const double u = pos - static_cast<double>(base);  // in [1, 2)
  Complex acc{};
  for (int i = 0; i < 4; ++i) {
    double l = 1.0;
    for (int m = 0; m < 4; ++m)
      if (m != i) l *= (u - m) / static_cast<double>(i - m);
    acc += l * t.values[static_cast<std::size_t>(base + i)];
  }
  return acc;
}

double BumpProfile::mass() const {
  quad::Options opt;
  opt.abs_tol = 1e-16;
  opt.rel_tol = 1e-14;
  return quad::adaptive<double>([this](double x) { return (*this)(x); }, -radius_, radius_, opt).value;
}

MaximalConfig MaximalConfig::standard(std::size_t n, double rho, int k_min, int k_max) {
  if (!(rho > 1.0)) throw PreconditionError("dilation ratio must exceed 1");
  if (k_min > k_max) throw PreconditionError("empty dilation lattice");
  MaximalConfig cfg;
  const BumpProfile bump = BumpProfile::standard();
  std::vector<double> lattice;
  for (int k = k_min; k <= k_max; ++k) lattice.push_back(std::pow(rho, k));
  cfg.bumps.assign(n, bump);
  cfg.scales.assign(n, lattice);
  return cfg;
}

void MaximalConfig::validate(std::size_t n) const {
  if (bumps.size() != n || scales.size() != n) throw PreconditionError("maximal config: one bump and lattice per axis");
  for (const auto& b : bumps)
    if (std::abs(b.mass() - 1.0) > 1e-10) throw PreconditionError("maximal config: bump must have unit integral");
  for (const auto& s : scales) {
    if (s.empty()) throw PreconditionError("maximal config: empty lattice");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!(s[i] > 0.0) || !std::isfinite(s[i])) throw PreconditionError("maximal config: scales must be positive");
      if (i > 0 && !(s[i] > s[i - 1])) throw PreconditionError("maximal config: scales must increase");
    }
  }
}

namespace {

std::vector<Complex> bump_multiplier(const BumpProfile& b, const std::vector<double>& xi, double t) {
  std::vector<Complex> m(xi.size());
  for (std::size_t k = 0; k < xi.size(); ++k) m[k] = b.fourier(t * xi[k]) / static_cast<double>(xi.size());
  return m;
}

}  // namespace

GridFunction bump_average(const GridFunction& g, const MaximalConfig& cfg, const std::vector<double>& t) {
  const std::size_t n = g.spec.dimension();
  if (t.size() != n) throw PreconditionError("bump_average: one scale per axis");
  GridFunction out = g;
  for (std::size_t j = 0; j < n; ++j) {
    auto m = bump_multiplier(cfg.bumps[j], bin_frequencies(g.spec, j), t[j]);
    for (auto& v : m) v *= static_cast<double>(g.spec.points[j]);
    axis_multiplier(out.samples, g.spec, j, m);
  }
  return out;
}

GridFunction smooth_maximal(const GridFunction& g, const MaximalConfig& cfg) {
  g.spec.validate();
  const std::size_t n = g.spec.dimension();
  cfg.validate(n);
  const GridSpec& s = g.spec;
  std::vector<std::vector<double>> xi(n);
  for (std::size_t j = 0; j < n; ++j) xi[j] = bin_frequencies(s, j);

  // Forward transform once on every axis; each lattice point then needs only
  // multipliers and inverse transforms, shared down the axis recursion.
  std::vector<Complex> spectrum = g.samples;
  for (std::size_t j = 0; j < n; ++j) detail::fft_one_axis(spectrum, s.points, j, -1);

  const std::size_t first = cfg.scales[0].size();
  const std::size_t chunks = std::min(first, thread_count());
  std::vector<std::vector<double>> partial(chunks, std::vector<double>(g.size(), 0.0));
  parallel_for(chunks, [&](std::size_t c) {
    std::vector<double>& best = partial[c];
    std::function<void(std::size_t, std::size_t, const std::vector<Complex>&)> descend =
        [&](std::size_t j, std::size_t i, const std::vector<Complex>& data) {
          std::vector<Complex> next = data;
          multiply_axis(next, s, j, bump_multiplier(cfg.bumps[j], xi[j], cfg.scales[j][i]));
          detail::fft_one_axis(next, s.points, j, +1);
          if (j + 1 == n) {
            for (std::size_t k = 0; k < next.size(); ++k) best[k] = std::max(best[k], std::abs(next[k]));
            return;
          }
          for (std::size_t i2 = 0; i2 < cfg.scales[j + 1].size(); ++i2) descend(j + 1, i2, next);
        };
    for (std::size_t i0 = c; i0 < first; i0 += chunks) descend(0, i0, spectrum);
  });
  GridFunction out(s);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double m = 0.0;
    for (const auto& p : partial) m = std::max(m, p[i]);
    out.samples[i] = m;
  }
  return out;
}

double h1_norm_maximal(const GridFunction& g, const MaximalConfig& cfg) { return lp_norm(smooth_maximal(g, cfg), 1.0); }

}  // namespace hlab
