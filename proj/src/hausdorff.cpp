#include "hlab/hausdorff.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "hlab/errors.hpp"
#include "hlab/parallel.hpp"
#include "hlab/quadrature.hpp"

namespace hlab {

namespace {

void check_config(const QuadConfig& q) {
  if (!(q.tolerance > 0.0)) throw PreconditionError("quadrature tolerance must be positive");
  if (q.max_subdivisions == 0) throw PreconditionError("max_subdivisions must be positive");
}

double to_var(double t, bool log_domain) {
  if (!log_domain) return t;
  if (t <= 0.0) return -kInfinity;
  if (!std::isfinite(t)) return kInfinity;
  return std::log(t);
}

struct AxisSetup {
  double lo;
  double hi;
  std::vector<double> anchors;
};

// Range of the kernel variable on one axis and the points where the integrand changes.
AxisSetup axis_setup(const Kernel& k, std::size_t j, std::span<const double> features, double x, bool adjoint,
                     bool log_domain) {
  const AxisRange r = k.axis_range(j);
  std::vector<double> pts(k.breakpoints(j).begin(), k.breakpoints(j).end());
  pts.push_back(1.0);
  for (double b : features) {
    if (b == 0.0 || x == 0.0 || x / b <= 0.0) continue;
    pts.push_back(adjoint ? b / x : x / b);
  }
  AxisSetup s{to_var(r.lo, log_domain), to_var(r.hi, log_domain), {}};
  for (double t : pts)
    if (t > 0.0 && std::isfinite(t)) s.anchors.push_back(to_var(t, log_domain));
  return s;
}

quad::LineOptions line_options(const QuadConfig& q, double tol) {
  quad::LineOptions opt;
  opt.abs_tol = tol;
  opt.max_subdivisions = q.max_subdivisions;
  opt.limit = q.log_domain ? 700.0 : 1e12;
  return opt;
}

PointValue axis_value(const Kernel& k, std::size_t j, const PointwiseMap::Axis& f, double x, const QuadConfig& q,
                      bool adjoint, double tol) {
  const bool log_domain = q.log_domain;
  const AxisSetup s = axis_setup(k, j, f.features, x, adjoint, log_domain);
  auto integrand = [&](double v) -> Complex {
    const double t = log_domain ? std::exp(v) : v;
    const double kv = k.factor(j, t);
    if (kv == 0.0) return Complex{};
    double weight;
    if (log_domain)
      weight = adjoint ? t : 1.0;
    else
      weight = adjoint ? 1.0 : 1.0 / t;
    return f.fn(adjoint ? x * t : x / t) * (kv * weight);
  };
  const auto est = quad::integrate_line<Complex>(integrand, s.lo, s.hi, s.anchors, line_options(q, tol));
  return {est.value, est.error, est.converged};
}

PointValue nested_value(const Kernel& k, const PointwiseMap& f, std::span<const double> x, const QuadConfig& q,
                        bool adjoint) {
  const std::size_t n = k.dimension();
  const bool log_domain = q.log_domain;
  std::vector<AxisSetup> setups;
  for (std::size_t j = 0; j < n; ++j) setups.push_back(axis_setup(k, j, f.features(j), x[j], adjoint, log_domain));
  std::vector<double> t(n, 1.0), y(n, 0.0);
  bool inner_ok = true;

  std::function<quad::Estimate<Complex>(std::size_t, double)> level = [&](std::size_t j, double tol) {
    auto integrand = [&](double v) -> Complex {
      const double tj = log_domain ? std::exp(v) : v;
      t[j] = tj;
      y[j] = adjoint ? x[j] * tj : x[j] / tj;
      double weight;
      if (log_domain)
        weight = adjoint ? tj : 1.0;
      else
        weight = adjoint ? 1.0 : 1.0 / tj;
      if (j + 1 == n) {
        const double kv = k(t);
        if (kv == 0.0) return Complex{};
        return f(y) * (kv * weight);
      }
      const auto inner = level(j + 1, tol / 10.0);
      if (!inner.converged) inner_ok = false;
      return inner.value * weight;
    };
    return quad::integrate_line<Complex>(integrand, setups[j].lo, setups[j].hi, setups[j].anchors,
                                         line_options(q, tol));
  };
  const auto est = level(0, q.tolerance);
  return {est.value, est.error, est.converged && inner_ok};
}

PointValue point_value(const Kernel& k, const PointwiseMap& f, std::span<const double> x, const QuadConfig& q,
                       bool adjoint) {
  check_config(q);
  const std::size_t n = k.dimension();
  if (f.dimension() != n || x.size() != n) throw PreconditionError("kernel, map and point dimensions differ");
  if (k.separable() && f.separable()) {
    std::vector<PointValue> parts;
    for (std::size_t j = 0; j < n; ++j)
      parts.push_back(axis_value(k, j, f.axis(j), x[j], q, adjoint, q.tolerance / (2.0 * n)));
    if (n > 1) {
      for (std::size_t j = 0; j < n; ++j) {
        double scale = 1.0;
        for (std::size_t i = 0; i < n; ++i)
          if (i != j) scale *= std::max(1.0, std::abs(parts[i].value));
        if (scale > 1.0) parts[j] = axis_value(k, j, f.axis(j), x[j], q, adjoint, q.tolerance / (2.0 * n * scale));
      }
    }
    PointValue out{1.0, 0.0, true};
    for (std::size_t j = 0; j < n; ++j) {
      out.value *= parts[j].value;
      out.converged = out.converged && parts[j].converged;
      double others = 1.0;
      for (std::size_t i = 0; i < n; ++i)
        if (i != j) others *= std::abs(parts[i].value);
      out.error += parts[j].error * others;
    }
    return out;
  }
  return nested_value(k, f, x, q, adjoint);
}

GridFunction apply(const Kernel& k, const PointwiseMap& f, const GridSpec& spec, const QuadConfig& q, bool adjoint) {
  check_config(q);
  spec.validate();
  if (f.dimension() != k.dimension() || spec.dimension() != k.dimension())
    throw PreconditionError("kernel, map and grid dimensions differ");
  if (k.separable() && f.separable())
    return outer_product(spec, separable_axis_values(k, f, spec, q, adjoint));
  GridFunction out(spec);
  parallel_for(out.size(), [&](std::size_t i) {
    const auto x = spec.node(i);
    const PointValue pv = nested_value(k, f, x, q, adjoint);
    if (!pv.converged || !std::isfinite(pv.value.real()) || !std::isfinite(pv.value.imag()))
      throw QuadratureError(x, pv.value, pv.error);
    out.samples[i] = pv.value;
  });
  return out;
}

}  // namespace

PointValue hausdorff_at(const Kernel& k, const PointwiseMap& f, std::span<const double> x, const QuadConfig& q) {
  return point_value(k, f, x, q, false);
}

PointValue adjoint_at(const Kernel& k, const PointwiseMap& f, std::span<const double> x, const QuadConfig& q) {
  return point_value(k, f, x, q, true);
}

std::vector<PointValue> axis_action(const Kernel& k, std::size_t axis, const PointwiseMap::Axis& f,
                                    std::span<const double> x, const QuadConfig& q, bool adjoint) {
  check_config(q);
  if (!k.separable()) throw PreconditionError("axis_action needs a separable kernel");
  if (axis >= k.dimension()) throw PreconditionError("axis index out of range");
  std::vector<PointValue> out(x.size());
  parallel_for(x.size(), [&](std::size_t i) { out[i] = axis_value(k, axis, f, x[i], q, adjoint, q.tolerance); });
  return out;
}

std::vector<std::vector<Complex>> separable_axis_values(const Kernel& k, const PointwiseMap& f, const GridSpec& spec,
                                                        const QuadConfig& q, bool adjoint) {
  check_config(q);
  const std::size_t n = k.dimension();
  if (!k.separable() || !f.separable()) throw PreconditionError("separable_axis_values needs separable inputs");
  if (f.dimension() != n || spec.dimension() != n) throw PreconditionError("kernel, map and grid dimensions differ");

  auto run_axis = [&](std::size_t j, double tol) {
    QuadConfig qa = q;
    qa.tolerance = tol;
    const auto xs = spec.axis_coordinates(j);
    const auto vals = axis_action(k, j, f.axis(j), xs, qa, adjoint);
    std::vector<Complex> out(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (!vals[i].converged || !std::isfinite(vals[i].value.real()) || !std::isfinite(vals[i].value.imag())) {
        std::vector<double> node(n);
        for (std::size_t m = 0; m < n; ++m) node[m] = spec.coordinate(m, 0);
        node[j] = xs[i];
        throw QuadratureError(node, vals[i].value, vals[i].error);
      }
      out[i] = vals[i].value;
    }
    return out;
  };

  const double base = q.tolerance / (2.0 * n);
  std::vector<std::vector<Complex>> axes(n);
  for (std::size_t j = 0; j < n; ++j) axes[j] = run_axis(j, base);
  if (n > 1) {
    std::vector<double> peak(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      for (const auto& v : axes[j]) peak[j] = std::max(peak[j], std::abs(v));
    for (std::size_t j = 0; j < n; ++j) {
      double scale = 1.0;
      for (std::size_t i = 0; i < n; ++i)
        if (i != j) scale *= std::max(1.0, peak[i]);
      if (scale > 1.0) axes[j] = run_axis(j, base / scale);
    }
  }
  return axes;
}

GridFunction apply_hausdorff(const Kernel& k, const PointwiseMap& f, const GridSpec& spec, const QuadConfig& q) {
  return apply(k, f, spec, q, false);
}

GridFunction apply_adjoint(const Kernel& k, const PointwiseMap& f, const GridSpec& spec, const QuadConfig& q) {
  return apply(k, f, spec, q, true);
}

}  // namespace hlab
