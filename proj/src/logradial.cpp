#include "hlab/logradial.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <valarray>

#include <boost/math/quadrature/gauss.hpp>

#include "fft.hpp"
#include "hlab/errors.hpp"
#include "hlab/parallel.hpp"
#include "hlab/quadrature.hpp"

namespace hlab {

namespace {

struct Rule {
  std::vector<double> nodes;    // on [0, 1], increasing
  std::vector<double> weights;  // sum to 1
};

template <unsigned Q>
Rule gauss_on_unit() {
  using G = boost::math::quadrature::gauss<double, Q>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < x.size(); ++i) {
    pts.emplace_back(x[i], w[i]);
    if (x[i] != 0.0) pts.emplace_back(-x[i], w[i]);
  }
  std::sort(pts.begin(), pts.end());
  Rule r;
  for (const auto& [xi, wi] : pts) {
    r.nodes.push_back(0.5 * (1.0 + xi));
    r.weights.push_back(0.5 * wi);
  }
  return r;
}

const Rule& rule_for(std::size_t order) {
  static const Rule r4 = gauss_on_unit<4>();
  static const Rule r8 = gauss_on_unit<8>();
  static const Rule r16 = gauss_on_unit<16>();
  switch (order) {
    case 4: return r4;
    case 8: return r8;
    case 16: return r16;
    default: throw PreconditionError("log-radial order must be 4, 8 or 16");
  }
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

double log_or_inf(double t) {
  if (t <= 0.0) return -kInfinity;
  if (!std::isfinite(t)) return kInfinity;
  return std::log(t);
}

// Convolution operator for one axis of a separable kernel on one half-line.
class AxisOperator {
 public:
  AxisOperator(const Kernel& k, std::size_t j, const LogAxis& axis, const FastPathOptions& opt)
      : cells_(axis.cells),
        order_(axis.order),
        du_(axis.cell_width()),
        span_(axis.u_max - axis.u_min),
        padded_(next_pow2(2 * axis.cells)),
        forward_(padded_, axis.order, -1),
        inverse_(padded_, axis.order, +1) {
    const Rule& rule = rule_for(order_);
    const std::size_t q = order_;
    const std::size_t C = cells_;
    const std::size_t P = padded_;
    const AxisRange range = k.axis_range(j);
    const double s_lo = log_or_inf(range.lo);
    const double s_hi = log_or_inf(range.hi);
    std::vector<double> s_breaks;
    for (double b : k.breakpoints(j))
      if (b > 0.0 && std::isfinite(b)) s_breaks.push_back(std::log(b));
    for (double e : {s_lo, s_hi})
      if (std::isfinite(e)) s_breaks.push_back(e);
    auto kernel = [k, j](double s) { return k.factor(j, std::exp(s)); };

    // Lagrange basis through the cell nodes, evaluated at v in [0, 1].
    auto basis = [&rule, q](double v) {
      std::valarray<double> out(1.0, q);
      for (std::size_t b = 0; b < q; ++b)
        for (std::size_t m = 0; m < q; ++m)
          if (m != b) out[b] *= (v - rule.nodes[m]) / (rule.nodes[b] - rule.nodes[m]);
      return out;
    };

    weights_hat_.assign(q * q * P, Complex{});
    const std::size_t shifts = 2 * C - 1;
    parallel_for(shifts, [&](std::size_t shift) {
      const double m = static_cast<double>(shift) - static_cast<double>(C - 1);
      for (std::size_t a = 0; a < q; ++a) {
        const double top = (m + rule.nodes[a]) * du_;
        const double bottom = top - du_;
        if (bottom >= s_hi || top <= s_lo) continue;
        std::vector<double> v_breaks;
        for (double sb : s_breaks) {
          const double v = (top - sb) / du_;
          if (v > 0.0 && v < 1.0) v_breaks.push_back(v);
        }
        auto integrand = [&](double v) {
          const double kv = kernel(top - v * du_);
          if (kv == 0.0) return std::valarray<double>(0.0, q);
          std::valarray<double> l = basis(v);
          l *= kv;
          return l;
        };
        const auto est = quad::adaptive<std::valarray<double>>(
            integrand, 0.0, 1.0, {opt.weight_tolerance, 1e-13, 400}, v_breaks);
        for (std::size_t b = 0; b < q; ++b) weights_hat_[(a * q + b) * P + shift] = est.value[b] * du_;
      }
    });
    detail::BatchFft(P, q * q, -1).run(weights_hat_.data());

    // Lower extension: mass of the kernel beyond each output offset.
    const std::size_t M = C * q;
    tail_.assign(M, 0.0);
    leak_.assign(M, 0.0);
    std::vector<double> d(M);
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t a = 0; a < q; ++a) d[c * q + a] = (static_cast<double>(c) + rule.nodes[a]) * du_;
    quad::LineOptions line;
    line.abs_tol = 1e-15;
    line.rel_tol = 1e-13;
    line.max_subdivisions = 400;
    const auto last = quad::integrate_line<double>(kernel, std::max(d[M - 1], s_lo), s_hi, s_breaks, line);
    tail_[M - 1] = last.divergent ? kInfinity : last.value;
    for (std::size_t i = M - 1; i-- > 0;) {
      const double a = std::max(d[i], s_lo), b = std::min(d[i + 1], s_hi);
      double piece = 0.0;
      if (a < b) piece = quad::adaptive<double>(kernel, a, b, {1e-16, 1e-13, 200}, s_breaks).value;
      tail_[i] = tail_[i + 1] + piece;
    }
    auto abs_kernel = [&](double s) { return std::abs(kernel(s)); };
    parallel_for(M, [&](std::size_t i) {
      const double a = std::max(d[i] - 2.0 * span_, s_lo), b = std::min(d[i] - span_, s_hi);
      if (a < b) leak_[i] = quad::adaptive<double>(abs_kernel, a, b, {1e-14, 1e-8, 200}, s_breaks).value;
    });
  }

  // in/out hold the M = cells * order samples of one half-line, stride apart.
  // Returns the squared leakage estimate weighted by `w` (dx weights of the half-line).
  double apply(const Complex* in, Complex* out, std::size_t stride, const std::vector<double>& w,
               std::vector<Complex>& fb, std::vector<Complex>& y) const {
    const std::size_t q = order_, C = cells_, P = padded_, M = C * q;
    fb.assign(q * P, Complex{});
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t b = 0; b < q; ++b) fb[b * P + c] = in[(c * q + b) * stride];
    const Complex left = in[0];
    const double last = std::abs(in[(M - 1) * stride]);
    forward_.run(fb.data());
    y.assign(q * P, Complex{});
    for (std::size_t a = 0; a < q; ++a) {
      Complex* ya = y.data() + a * P;
      for (std::size_t b = 0; b < q; ++b) {
        const Complex* wab = weights_hat_.data() + (a * q + b) * P;
        const Complex* fbb = fb.data() + b * P;
        for (std::size_t i = 0; i < P; ++i) ya[i] += fbb[i] * wab[i];
      }
    }
    inverse_.run(y.data());
    const double norm = 1.0 / static_cast<double>(P);
    double leak = 0.0;
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t a = 0; a < q; ++a) {
        const std::size_t i = c * q + a;
        Complex v = y[a * P + c + C - 1] * norm;
        if (left != Complex{}) v += left * tail_[i];
        out[i * stride] = v;
        const double l = last * leak_[i];
        leak += l * l * w[i];
      }
    return leak;
  }

 private:
  std::size_t cells_;
  std::size_t order_;
  double du_;
  double span_;
  std::size_t padded_;
  detail::BatchFft forward_;
  detail::BatchFft inverse_;
  std::vector<Complex> weights_hat_;
  std::vector<double> tail_;
  std::vector<double> leak_;
};

}  // namespace

std::size_t LogRadialGrid::size() const {
  std::size_t total = 1;
  for (std::size_t j = 0; j < dimension(); ++j) total *= axis_size(j);
  return total;
}

std::vector<double> LogRadialGrid::axis_nodes(std::size_t j) const {
  const LogAxis& ax = axes[j];
  const Rule& rule = rule_for(ax.order);
  const std::size_t M = ax.half_size();
  std::vector<double> x(2 * M);
  for (std::size_t c = 0; c < ax.cells; ++c)
    for (std::size_t a = 0; a < ax.order; ++a) {
      const double u = ax.u_min + (static_cast<double>(c) + rule.nodes[a]) * ax.cell_width();
      x[c * ax.order + a] = -std::exp(u);
      x[M + c * ax.order + a] = std::exp(u);
    }
  return x;
}

std::vector<double> LogRadialGrid::axis_weights(std::size_t j) const {
  const LogAxis& ax = axes[j];
  const Rule& rule = rule_for(ax.order);
  const auto x = axis_nodes(j);
  std::vector<double> w(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) w[i] = rule.weights[i % ax.order] * ax.cell_width() * std::abs(x[i]);
  return w;
}

void LogRadialGrid::validate() const {
  if (axes.empty()) throw PreconditionError("log-radial grid needs at least one axis");
  for (const auto& ax : axes) {
    if (!(std::isfinite(ax.u_min) && std::isfinite(ax.u_max) && ax.u_min < ax.u_max))
      throw PreconditionError("log-radial grid: need finite u_min < u_max");
    if (ax.cells < 2) throw PreconditionError("log-radial grid: need at least two cells");
    rule_for(ax.order);
  }
}

LogRadialFunction sample_log_radial(const PointwiseMap& f, const LogRadialGrid& grid) {
  grid.validate();
  if (f.dimension() != grid.dimension()) throw PreconditionError("sample_log_radial: dimension mismatch");
  const std::size_t n = grid.dimension();
  LogRadialFunction out{grid, std::vector<Complex>(grid.size())};
  std::vector<std::vector<double>> nodes(n);
  for (std::size_t j = 0; j < n; ++j) nodes[j] = grid.axis_nodes(j);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    std::size_t rest = i;
    for (std::size_t j = n; j-- > 0;) {
      x[j] = nodes[j][rest % nodes[j].size()];
      rest /= nodes[j].size();
    }
    const Complex v = f(x);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NonFiniteSample(x, v);
    out.samples[i] = v;
  }
  return out;
}

LogRadialFunction apply_separable_fast(const Kernel& k, const LogRadialFunction& g, const FastPathOptions& opt) {
  if (!k.separable()) throw PreconditionError("apply_separable_fast needs a separable kernel");
  const LogRadialGrid& grid = g.grid;
  grid.validate();
  if (grid.dimension() != k.dimension()) throw PreconditionError("apply_separable_fast: dimension mismatch");
  if (g.samples.size() != grid.size()) throw PreconditionError("apply_separable_fast: sample count mismatch");
  const std::size_t n = grid.dimension();

  std::vector<std::vector<double>> weights(n);
  for (std::size_t j = 0; j < n; ++j) weights[j] = grid.axis_weights(j);

  LogRadialFunction cur = g;
  for (std::size_t j = 0; j < n; ++j) {
    const AxisOperator op(k, j, grid.axes[j], opt);
    const std::size_t len = grid.axis_size(j);
    const std::size_t M = len / 2;
    std::size_t outer = 1, inner = 1;
    for (std::size_t i = 0; i < j; ++i) outer *= grid.axis_size(i);
    for (std::size_t i = j + 1; i < n; ++i) inner *= grid.axis_size(i);
    LogRadialFunction next{grid, std::vector<Complex>(cur.samples.size())};
    const std::size_t lines = outer * inner;
    std::vector<double> leak(lines, 0.0);
    std::vector<std::vector<double>> half_w(2);
    half_w[0].assign(weights[j].begin(), weights[j].begin() + M);
    half_w[1].assign(weights[j].begin() + M, weights[j].end());
    parallel_for(lines, [&](std::size_t line) {
      const std::size_t o = line / inner, in = line % inner;
      // dx weight of this line in the other axes
      double other = 1.0;
      std::size_t rest = o;
      for (std::size_t i = j; i-- > 0;) {
        other *= weights[i][rest % grid.axis_size(i)];
        rest /= grid.axis_size(i);
      }
      rest = in;
      for (std::size_t i = n; i-- > j + 1;) {
        other *= weights[i][rest % grid.axis_size(i)];
        rest /= grid.axis_size(i);
      }
      std::vector<Complex> fb, y;
      const std::size_t base = o * len * inner + in;
      for (std::size_t h = 0; h < 2; ++h) {
        const std::size_t start = base + h * M * inner;
        leak[line] += other * op.apply(cur.samples.data() + start, next.samples.data() + start, inner, half_w[h], fb, y);
      }
    });
    double leaked = 0.0;
    for (double l : leak) leaked += l;
    const double out_norm = log_radial_l2(next);
    const double ratio = out_norm > 0.0 ? std::sqrt(leaked) / out_norm : std::sqrt(leaked);
    if (ratio > opt.aliasing_threshold) throw AliasingError(ratio, opt.aliasing_threshold);
    cur = std::move(next);
  }
  return cur;
}

double log_radial_l2(const LogRadialFunction& g) {
  const std::size_t n = g.grid.dimension();
  std::vector<std::vector<double>> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = g.grid.axis_weights(j);
  double total = 0.0;
  for (std::size_t i = 0; i < g.samples.size(); ++i) {
    double wi = 1.0;
    std::size_t rest = i;
    for (std::size_t j = n; j-- > 0;) {
      wi *= w[j][rest % w[j].size()];
      rest /= w[j].size();
    }
    total += std::norm(g.samples[i]) * wi;
  }
  return std::sqrt(total);
}

double log_radial_relative_l2(const LogRadialFunction& approx, const LogRadialFunction& reference) {
  if (approx.samples.size() != reference.samples.size())
    throw PreconditionError("log_radial_relative_l2: size mismatch");
  LogRadialFunction diff = approx;
  for (std::size_t i = 0; i < diff.samples.size(); ++i) diff.samples[i] -= reference.samples[i];
  const double ref = log_radial_l2(reference);
  const double d = log_radial_l2(diff);
  return ref > 0.0 ? d / ref : d;
}

}  // namespace hlab
