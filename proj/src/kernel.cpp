#include "hlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "hlab/errors.hpp"
#include "hlab/quadrature.hpp"

namespace hlab {

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

std::string join_params(std::string_view name, std::span<const double> params) {
  std::string out(name);
  if (params.empty()) return out;
  out += '(';
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ',';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", params[i]);
    out += buf;
  }
  return out + ')';
}

Kernel separable_family(std::size_t n, Kernel::Factor f, AxisRange range, std::vector<double> breaks,
                        std::string label) {
  Kernel::Parts parts;
  parts.dimension = n;
  parts.support = std::vector<AxisRange>(n, range);
  parts.factors = std::vector<Kernel::Factor>(n, std::move(f));
  parts.breakpoints = std::vector<std::vector<double>>(n, std::move(breaks));
  parts.label = std::move(label);
  return Kernel(std::move(parts));
}

double bump_normalizer() {
  static const double z = [] {
    auto raw = [](double x) {
      const double d = 1.0 - x * x;
      return d > 0.0 ? std::exp(-1.0 / d) : 0.0;
    };
    const double zero = 0.0;
    return quad::adaptive<double>(raw, -1.0, 1.0, {1e-16, 1e-15, 400}, std::span<const double>(&zero, 1))
        .value;
  }();
  return z;
}

double log_or_inf(double t) {
  if (t <= 0.0) return -kInfinity;
  if (!std::isfinite(t)) return kInfinity;
  return std::log(t);
}

std::vector<double> log_anchors(std::span<const double> breaks) {
  std::vector<double> out{0.0};
  for (double b : breaks)
    if (b > 0.0 && std::isfinite(b)) out.push_back(std::log(b));
  return out;
}

void check_alpha(const Kernel& k, std::span<const double> alpha) {
  if (alpha.size() != k.dimension())
    throw PreconditionError("moment: alpha has " + std::to_string(alpha.size()) +
                            " entries for a kernel of dimension " + std::to_string(k.dimension()));
  for (double a : alpha)
    if (!std::isfinite(a)) throw PreconditionError("moment: alpha must be finite");
}

quad::Estimate<double> axis_moment(const Kernel& k, std::size_t j, double alpha, double tol,
                                   double upper) {
  const AxisRange range = k.axis_range(j);
  const double hi = std::min(range.hi, upper);
  if (!(hi > range.lo)) return {};
  auto integrand = [&](double s) {
    const double t = std::exp(s);
    const double v = k.factor(j, t);
    return v == 0.0 ? 0.0 : v * std::exp((1.0 - alpha) * s);
  };
  const auto anchors = log_anchors(k.breakpoints(j));
  quad::LineOptions opt;
  opt.abs_tol = tol;
  opt.max_subdivisions = 400;
  return quad::integrate_line<double>(integrand, log_or_inf(range.lo), log_or_inf(hi), anchors, opt);
}

MomentReport separable_moment(const Kernel& k, std::span<const double> alpha, double tol,
                              std::span<const double> upper) {
  const std::size_t n = k.dimension();
  auto bound = [&](std::size_t j) { return upper.empty() ? kInfinity : upper[j]; };
  std::vector<quad::Estimate<double>> parts(n);
  for (std::size_t j = 0; j < n; ++j)
    parts[j] = axis_moment(k, j, alpha[j], tol / (4.0 * n), bound(j));

  MomentReport out;
  out.alpha.assign(alpha.begin(), alpha.end());
  for (const auto& p : parts) out.evaluations += p.evaluations;
  for (const auto& p : parts)
    if (p.converged && p.value == 0.0 && p.error == 0.0) {
      out.value = 0.0;
      out.converged = true;
      return out;
    }
  for (const auto& p : parts)
    if (p.divergent || !std::isfinite(p.value)) {
      out.value = kInfinity;
      out.error_estimate = kInfinity;
      out.divergent = true;
      out.converged = false;
      return out;
    }
  if (n > 1) {
    // Tighten each factor by the size of the others so the product error meets tol.
    for (std::size_t j = 0; j < n; ++j) {
      double scale = 1.0;
      for (std::size_t i = 0; i < n; ++i)
        if (i != j) scale *= std::max(1.0, std::abs(parts[i].value));
      if (scale > 1.0) {
        parts[j] = axis_moment(k, j, alpha[j], tol / (4.0 * n * scale), bound(j));
        out.evaluations += parts[j].evaluations;
      }
    }
  }
  double value = 1.0;
  bool converged = true;
  for (const auto& p : parts) {
    value *= p.value;
    converged = converged && p.converged;
  }
  double error = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double others = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (i != j) others *= std::abs(parts[i].value);
    error += parts[j].error * others;
  }
  out.value = value;
  out.error_estimate = error;
  out.converged = converged && error <= tol;
  return out;
}

}  // namespace

double standard_bump(double x) {
  const double d = 1.0 - x * x;
  return d > 0.0 ? std::exp(-1.0 / d) / bump_normalizer() : 0.0;
}

Kernel::Kernel(Parts parts) {
  if (parts.dimension == 0) throw PreconditionError("kernel dimension must be positive");
  const std::size_t n = parts.dimension;
  if (parts.factors && parts.factors->size() != n)
    throw PreconditionError("kernel: separable factor count differs from dimension");
  if (parts.support) {
    if (parts.support->size() != n) throw PreconditionError("kernel: support box has wrong dimension");
    for (const auto& r : *parts.support)
      if (!(r.lo >= 0.0 && r.lo < r.hi)) throw PreconditionError("kernel: invalid support interval");
  }
  parts.breakpoints.resize(n);
  if (!parts.evaluator) {
    if (!parts.factors) throw PreconditionError("kernel: neither evaluator nor factors given");
    auto factors = *parts.factors;
    parts.evaluator = [factors](Point t) {
      double v = 1.0;
      for (std::size_t j = 0; j < factors.size() && v != 0.0; ++j) v *= factors[j](t[j]);
      return v;
    };
  }
  parts_ = std::make_shared<const Parts>(std::move(parts));
}

double Kernel::operator()(Point t) const {
  if (parts_->support) {
    const auto& box = *parts_->support;
    for (std::size_t j = 0; j < box.size(); ++j)
      if (!(t[j] >= box[j].lo && t[j] <= box[j].hi)) return 0.0;
  }
  return parts_->evaluator(t);
}

double Kernel::factor(std::size_t j, double t) const {
  const AxisRange r = axis_range(j);
  if (!(t >= r.lo && t <= r.hi)) return 0.0;
  return (*parts_->factors)[j](t);
}

AxisRange Kernel::axis_range(std::size_t j) const {
  if (parts_->support) return (*parts_->support)[j];
  return {};
}

std::span<const double> Kernel::breakpoints(std::size_t j) const { return parts_->breakpoints[j]; }

std::vector<std::string> registry_names() {
  return {"box", "hardy", "adjoint_hardy", "exp", "power_box", "bump"};
}

Kernel make_named_kernel(std::string_view name, std::span<const double> params, std::size_t n) {
  if (n == 0) throw PreconditionError("kernel dimension must be positive");
  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (params.size() < lo || params.size() > hi)
      throw PreconditionError(std::string(name) + ": expected between " + std::to_string(lo) + " and " +
                              std::to_string(hi) + " parameters, got " + std::to_string(params.size()));
  };
  const std::string label = join_params(name, params);

  if (name == "box" || name == "adjoint_hardy") {
    arity(0, 1);
    const double b = params.empty() ? 1.0 : params[0];
    if (!finite_positive(b)) throw PreconditionError(std::string(name) + ": right end must be positive");
    return separable_family(
        n, [b](double t) { return t > 0.0 && t <= b ? 1.0 : 0.0; }, {0.0, b}, {b}, label);
  }
  if (name == "hardy") {
    arity(0, 0);
    return separable_family(
        n, [](double t) { return t >= 1.0 ? 1.0 / t : 0.0; }, {1.0, kInfinity}, {1.0}, label);
  }
  if (name == "exp") {
    arity(0, 1);
    const double rate = params.empty() ? 1.0 : params[0];
    if (!finite_positive(rate)) throw PreconditionError("exp: rate must be positive");
    return separable_family(
        n, [rate](double t) { return std::exp(-rate * t); }, {0.0, kInfinity}, {1.0 / rate}, label);
  }
  if (name == "power_box") {
    arity(1, 2);
    const double beta = params[0];
    const double b = params.size() > 1 ? params[1] : 1.0;
    if (!std::isfinite(beta)) throw PreconditionError("power_box: exponent must be finite");
    if (!finite_positive(b)) throw PreconditionError("power_box: right end must be positive");
    return separable_family(
        n, [beta, b](double t) { return t > 0.0 && t <= b ? std::pow(t, beta) : 0.0; }, {0.0, b}, {b},
        label);
  }
  if (name == "bump") {
    arity(1, 2);
    const double w = params[0];
    const double c = params.size() > 1 ? params[1] : 1.0;
    if (!finite_positive(c)) throw PreconditionError("bump: center must be positive");
    if (!(std::isfinite(w) && w > 0.0 && w < c))
      throw PreconditionError("bump: width must lie in (0, center)");
    return separable_family(
        n, [w, c](double t) { return standard_bump((t - c) / w) / w; }, {c - w, c + w}, {c - w, c, c + w},
        label);
  }
  throw PreconditionError("unknown kernel family '" + std::string(name) + "'");
}

MomentReport moment_general(const Kernel& k, std::span<const double> alpha, double tol,
                            std::span<const double> upper) {
  check_alpha(k, alpha);
  if (!(tol > 0.0)) throw PreconditionError("moment: tolerance must be positive");
  if (!upper.empty() && upper.size() != k.dimension())
    throw PreconditionError("moment: upper limits have wrong dimension");
  if (k.separable()) return separable_moment(k, alpha, tol, upper);
  if (upper.empty()) return moment_nested(k, alpha, tol);
  std::vector<AxisRange> box(k.dimension());
  for (std::size_t j = 0; j < box.size(); ++j) box[j] = {0.0, upper[j]};
  return moment_nested(restrict_to(k, box), alpha, tol);
}

MomentReport moment(const Kernel& k, std::span<const double> alpha, double tol) {
  check_alpha(k, alpha);
  for (double a : alpha)
    if (a < 0.0 || a > 1.0) throw PreconditionError("moment: alpha must lie in [0, 1]");
  return moment_general(k, alpha, tol);
}

MomentReport moment(const Kernel& k, double alpha, double tol) {
  const std::vector<double> a(k.dimension(), alpha);
  return moment(k, a, tol);
}

MomentReport moment_nested(const Kernel& k, std::span<const double> alpha, double tol) {
  check_alpha(k, alpha);
  const std::size_t n = k.dimension();
  std::vector<double> t(n, 1.0);
  bool inner_ok = true;
  bool inner_divergent = false;
  std::size_t evaluations = 0;

  std::function<quad::Estimate<double>(std::size_t, double)> level = [&](std::size_t j, double level_tol) {
    const AxisRange r = k.axis_range(j);
    auto integrand = [&](double s) {
      t[j] = std::exp(s);
      const double weight = std::exp((1.0 - alpha[j]) * s);
      if (j + 1 == n) {
        ++evaluations;
        const double v = k(t);
        return v == 0.0 ? 0.0 : v * weight;
      }
      const auto inner = level(j + 1, level_tol / 10.0);
      if (!inner.converged) inner_ok = false;
      if (inner.divergent) inner_divergent = true;
      return inner.value == 0.0 ? 0.0 : inner.value * weight;
    };
    quad::LineOptions opt;
    opt.abs_tol = level_tol;
    opt.max_subdivisions = 400;
    const auto anchors = log_anchors(k.breakpoints(j));
    return quad::integrate_line<double>(integrand, log_or_inf(r.lo), log_or_inf(r.hi), anchors, opt);
  };

  const auto outer = level(0, tol);
  MomentReport out;
  out.alpha.assign(alpha.begin(), alpha.end());
  out.evaluations = evaluations;
  if (outer.divergent || inner_divergent || !std::isfinite(outer.value)) {
    out.value = kInfinity;
    out.error_estimate = kInfinity;
    out.divergent = true;
    out.converged = false;
    return out;
  }
  out.value = outer.value;
  out.error_estimate = outer.error;
  out.converged = outer.converged && inner_ok && outer.error <= tol;
  return out;
}

Kernel reflect(const Kernel& k) {
  Kernel::Parts parts;
  parts.dimension = k.dimension();
  parts.nonnegative = k.nonnegative();
  parts.label = "reflect(" + k.label() + ")";
  if (k.support()) {
    std::vector<AxisRange> box;
    for (const auto& r : *k.support())
      box.push_back({std::isfinite(r.hi) ? 1.0 / r.hi : 0.0, r.lo > 0.0 ? 1.0 / r.lo : kInfinity});
    parts.support = box;
  }
  for (std::size_t j = 0; j < k.dimension(); ++j) {
    std::vector<double> inv;
    for (double b : k.breakpoints(j))
      if (b > 0.0 && std::isfinite(b)) inv.push_back(1.0 / b);
    parts.breakpoints.push_back(inv);
  }
  if (k.separable()) {
    std::vector<Kernel::Factor> factors;
    for (std::size_t j = 0; j < k.dimension(); ++j)
      factors.push_back([k, j](double t) { return k.factor(j, 1.0 / t) / t; });
    parts.factors = std::move(factors);
  } else {
    parts.evaluator = [k](Kernel::Point t) {
      std::vector<double> inv(t.size());
      double jac = 1.0;
      for (std::size_t j = 0; j < t.size(); ++j) {
        inv[j] = 1.0 / t[j];
        jac *= t[j];
      }
      return k(inv) / jac;
    };
  }
  return Kernel(std::move(parts));
}

Kernel restrict_to(const Kernel& k, std::vector<AxisRange> box) {
  const std::size_t n = k.dimension();
  if (box.size() != n) throw PreconditionError("restrict_to: box has wrong dimension");
  Kernel::Parts parts;
  parts.dimension = n;
  parts.nonnegative = k.nonnegative();
  parts.label = k.label() + "|box";
  bool empty = false;
  for (std::size_t j = 0; j < n; ++j) {
    const AxisRange r = k.axis_range(j);
    box[j].lo = std::max(box[j].lo, r.lo);
    box[j].hi = std::min(box[j].hi, r.hi);
    if (!(box[j].lo < box[j].hi)) empty = true;
    std::vector<double> breaks(k.breakpoints(j).begin(), k.breakpoints(j).end());
    for (double e : {box[j].lo, box[j].hi})
      if (e > 0.0 && std::isfinite(e)) breaks.push_back(e);
    parts.breakpoints.push_back(breaks);
  }
  if (empty) return zero_kernel(n);
  parts.support = box;
  if (k.separable()) {
    std::vector<Kernel::Factor> factors;
    for (std::size_t j = 0; j < n; ++j) factors.push_back([k, j](double t) { return k.factor(j, t); });
    parts.factors = std::move(factors);
  } else {
    parts.evaluator = [k](Kernel::Point t) { return k(t); };
  }
  return Kernel(std::move(parts));
}

Kernel truncate_inner(const Kernel& k, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw PreconditionError("truncate_inner: delta must lie in (0, 1)");
  const std::size_t n = k.dimension();
  for (std::size_t j = 0; j < n; ++j) {
    if (k.axis_range(j).hi <= 1.0) continue;
    // Undeclared or wider support: the mass beyond t_j = 1 must vanish numerically.
    std::vector<AxisRange> outside(n);
    outside[j] = {1.0, kInfinity};
    const std::vector<double> zero(n, 0.0);
    const auto mass = moment_general(restrict_to(k, outside), zero, 1e-12);
    if (mass.divergent || std::abs(mass.value) > 1e-10)
      throw PreconditionError("truncate_inner: kernel has mass outside (0,1]^n");
  }
  return restrict_to(k, std::vector<AxisRange>(n, AxisRange{delta, 1.0}));
}

Kernel truncate_scaled(const Kernel& k, double m) {
  if (!finite_positive(m)) throw PreconditionError("truncate_scaled: scale must be positive");
  const std::size_t n = k.dimension();
  Kernel::Parts parts;
  parts.dimension = n;
  parts.nonnegative = k.nonnegative();
  parts.label = k.label() + "|scaled";
  std::vector<AxisRange> box(n);
  for (std::size_t j = 0; j < n; ++j) {
    const AxisRange r = k.axis_range(j);
    box[j] = {r.lo / m, std::min(1.0, r.hi / m)};
    if (!(box[j].lo < box[j].hi)) return zero_kernel(n);
    std::vector<double> breaks{1.0};
    for (double b : k.breakpoints(j)) breaks.push_back(b / m);
    parts.breakpoints.push_back(breaks);
  }
  parts.support = box;
  if (k.separable()) {
    std::vector<Kernel::Factor> factors;
    for (std::size_t j = 0; j < n; ++j)
      factors.push_back([k, j, m](double t) { return t < 1.0 ? k.factor(j, m * t) : 0.0; });
    parts.factors = std::move(factors);
  } else {
    parts.evaluator = [k, m](Kernel::Point t) {
      std::vector<double> s(t.size());
      for (std::size_t j = 0; j < t.size(); ++j) {
        if (!(t[j] < 1.0)) return 0.0;
        s[j] = m * t[j];
      }
      return k(s);
    };
  }
  return Kernel(std::move(parts));
}

Kernel kernel_sum(const Kernel& a, const Kernel& b) {
  if (a.dimension() != b.dimension()) throw PreconditionError("kernel_sum: dimension mismatch");
  const std::size_t n = a.dimension();
  Kernel::Parts parts;
  parts.dimension = n;
  parts.nonnegative = a.nonnegative() && b.nonnegative();
  parts.label = a.label() + "+" + b.label();
  if (a.support() && b.support()) {
    std::vector<AxisRange> box(n);
    for (std::size_t j = 0; j < n; ++j)
      box[j] = {std::min(a.axis_range(j).lo, b.axis_range(j).lo),
                std::max(a.axis_range(j).hi, b.axis_range(j).hi)};
    parts.support = box;
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> breaks(a.breakpoints(j).begin(), a.breakpoints(j).end());
    breaks.insert(breaks.end(), b.breakpoints(j).begin(), b.breakpoints(j).end());
    for (const Kernel* k : {&a, &b})
      for (double e : {k->axis_range(j).lo, k->axis_range(j).hi})
        if (e > 0.0 && std::isfinite(e)) breaks.push_back(e);
    parts.breakpoints.push_back(breaks);
  }
  parts.evaluator = [a, b](Kernel::Point t) { return a(t) + b(t); };
  return Kernel(std::move(parts));
}

Kernel scaled(const Kernel& k, double c) {
  if (!std::isfinite(c)) throw PreconditionError("scaled: factor must be finite");
  Kernel::Parts parts;
  parts.dimension = k.dimension();
  parts.nonnegative = k.nonnegative() && c >= 0.0;
  parts.label = k.label() + "*c";
  parts.support = k.support();
  for (std::size_t j = 0; j < k.dimension(); ++j)
    parts.breakpoints.emplace_back(k.breakpoints(j).begin(), k.breakpoints(j).end());
  if (k.separable()) {
    std::vector<Kernel::Factor> factors;
    for (std::size_t j = 0; j < k.dimension(); ++j)
      factors.push_back([k, j, c](double t) { return (j == 0 ? c : 1.0) * k.factor(j, t); });
    parts.factors = std::move(factors);
  } else {
    parts.evaluator = [k, c](Kernel::Point t) { return c * k(t); };
  }
  return Kernel(std::move(parts));
}

Kernel zero_kernel(std::size_t n) {
  Kernel::Parts parts;
  parts.dimension = n;
  parts.support = std::vector<AxisRange>(n, AxisRange{0.0, 1.0});
  parts.factors = std::vector<Kernel::Factor>(n, [](double) { return 0.0; });
  parts.label = "zero";
  return Kernel(std::move(parts));
}

}  // namespace hlab
