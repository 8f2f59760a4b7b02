#include "hlab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "hlab/errors.hpp"
#include "hlab/transforms.hpp"

namespace hlab {

namespace {

using Axes = std::vector<std::vector<Complex>>;

GridSpec axis_spec(const GridSpec& s, std::size_t j) {
  GridSpec a;
  a.half_width = {s.half_width[j]};
  a.points = {s.points[j]};
  a.centering = s.centering;
  return a;
}

bool factorable(const Kernel& k, const PointwiseMap& f) {
  return k.separable() && f.separable() && f.dimension() == k.dimension();
}

PointwiseMap axis_map(const PointwiseMap& f, std::size_t j) { return PointwiseMap::line(f.axis(j).fn, f.axis(j).features); }

Axes axis_samples(const PointwiseMap& f, const GridSpec& s) {
  Axes out;
  for (std::size_t j = 0; j < s.dimension(); ++j) out.push_back(sample(axis_map(f, j), axis_spec(s, j)).samples);
  return out;
}

// |(x) a - (x) b| and |(x) b| in the weighted l2 norm, optionally restricted per axis.
std::pair<double, double> tensor_distance(const Axes& a, const Axes& b, const std::vector<double>& w,
                                          const std::vector<std::vector<char>>& keep) {
  const std::size_t n = a.size();
  if (n == 1) {
    double d = 0.0, r = 0.0;
    for (std::size_t i = 0; i < a[0].size(); ++i) {
      if (!keep.empty() && !keep[0][i]) continue;
      d += std::norm(a[0][i] - b[0][i]);
      r += std::norm(b[0][i]);
    }
    return {std::sqrt(d * w[0]), std::sqrt(r * w[0])};
  }
  double aa = 1.0, bb = 1.0;
  Complex ab = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    double sa = 0.0, sb = 0.0;
    Complex sab = 0.0;
    for (std::size_t i = 0; i < a[j].size(); ++i) {
      if (!keep.empty() && !keep[j][i]) continue;
      sa += std::norm(a[j][i]);
      sb += std::norm(b[j][i]);
      sab += a[j][i] * std::conj(b[j][i]);
    }
    aa *= sa * w[j];
    bb *= sb * w[j];
    ab *= sab * w[j];
  }
  return {std::sqrt(std::max(0.0, aa + bb - 2.0 * ab.real())), std::sqrt(bb)};
}

double l2(const GridFunction& g) { return lp_norm(g, 2.0); }

nlohmann::json grid_json(const GridSpec& s) {
  nlohmann::json j;
  j["L"] = s.half_width;
  j["N"] = s.points;
  j["centering"] = s.centering == Centering::cell ? "cell" : "node";
  return j;
}

nlohmann::json base_context(const Kernel& k, const GridSpec& s, bool factored) {
  nlohmann::json c;
  c["kernel"] = k.label();
  c["dimension"] = k.dimension();
  c["grid"] = grid_json(s);
  c["path"] = factored ? "factored" : "grid";
  return c;
}

double regularized(double diff, double ref) { return diff / (1.0 + ref); }
double plain(double diff, double ref) { return ref > 0.0 ? diff / ref : diff; }

// Hilbert transform of one axis factor: closed form when available, else spectral on the grid.
PointwiseMap::Axis hilbert_factor(const BatteryFunction& f, std::size_t j, const GridSpec& s) {
  const BatteryFunction& part = f.factors.empty() ? f : f.factors[j];
  if (part.hilbert) return part.hilbert->axis(0);
  const GridSpec a = axis_spec(s, j);
  const GridFunction h = hilbert_axis(sample(axis_map(f.f, j), a), 0);
  return InterpolatedMap(h).as_map().axis(0);
}

// Piecewise linear data has a kink at every node; adaptive quadrature needs room.
QuadConfig for_interpolated(QuadConfig q) {
  q.tolerance = std::max(q.tolerance, 1e-7);
  q.max_subdivisions = std::max<std::size_t>(q.max_subdivisions, 4000);
  return q;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

QuadConfig quad_for(const Kernel& k, QuadConfig q, bool adjoint) {
  if (!adjoint) return q;
  for (std::size_t j = 0; j < k.dimension(); ++j)
    if (!std::isfinite(k.axis_range(j).hi)) return q;
  q.log_domain = false;
  return q;
}

CheckReport check_duality(const Kernel& k, const PointwiseMap& f, const PointwiseMap& g, const GridSpec& spec,
                          double tolerance, const QuadConfig& q) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const bool factored = factorable(k, f) && g.separable();
  Complex lhs, rhs;
  double fn, gn;
  if (factored) {
    const Axes hf = separable_axis_values(k, f, spec, quad_for(k, q, false), false);
    const Axes ag = separable_axis_values(k, g, spec, quad_for(k, q, true), true);
    const Axes fs = axis_samples(f, spec), gs = axis_samples(g, spec);
    lhs = rhs = 1.0;
    fn = gn = 1.0;
    for (std::size_t j = 0; j < spec.dimension(); ++j) {
      const GridSpec a = axis_spec(spec, j);
      lhs *= pairing(GridFunction(a, hf[j]), GridFunction(a, gs[j]));
      rhs *= pairing(GridFunction(a, fs[j]), GridFunction(a, ag[j]));
      fn *= l2(GridFunction(a, fs[j]));
      gn *= l2(GridFunction(a, gs[j]));
    }
  } else {
    const GridFunction fs = sample(f, spec), gs = sample(g, spec);
    lhs = pairing(apply_hausdorff(k, f, spec, quad_for(k, q, false)), gs);
    rhs = pairing(fs, apply_adjoint(k, g, spec, quad_for(k, q, true)));
    fn = l2(fs);
    gn = l2(gs);
  }
  const double diff = std::abs(lhs - rhs);
  auto ctx = base_context(k, spec, factored);
  ctx["lhs"] = json_number(lhs.real());
  ctx["rhs"] = json_number(rhs.real());
  ctx["plain_relative"] = json_number(plain(diff, std::abs(lhs)));
  ctx["seconds"] = json_number(elapsed(t0));
  return make_check("duality", diff / (1.0 + fn * gn), tolerance, ctx);
}

CheckReport check_fourier_commutation(const Kernel& k, const BatteryFunction& f, const GridSpec& spec,
                                      double tolerance, const QuadConfig& q) {
  spec.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = spec.dimension();
  const GridSpec dual = spec.dual();
  std::vector<std::vector<char>> keep(n);
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double band = static_cast<double>(spec.points[j]) / (8.0 * spec.half_width[j]);
    const auto xi = dual.axis_coordinates(j);
    keep[j].resize(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) keep[j][i] = std::abs(xi[i]) <= band * (1.0 + 1e-12);
    w[j] = dual.spacing(j);
  }
  const bool closed = f.fourier.has_value();
  const bool factored = factorable(k, f.f) && (!closed || f.fourier->separable());
  std::pair<double, double> dist;
  if (factored) {
    const Axes hf = separable_axis_values(k, f.f, spec, quad_for(k, q, false), false);
    Axes lhs(n), rhs;
    std::vector<PointwiseMap::Axis> hat_axes;
    for (std::size_t j = 0; j < n; ++j) {
      lhs[j] = fourier(GridFunction(axis_spec(spec, j), hf[j])).samples;
      if (closed) {
        hat_axes.push_back(f.fourier->axis(j));
      } else {
        const GridFunction g = fourier(sample(axis_map(f.f, j), axis_spec(spec, j)));
        hat_axes.push_back(InterpolatedMap(g).as_map().axis(0));
      }
    }
    const QuadConfig qa = closed ? quad_for(k, q, true) : for_interpolated(quad_for(k, q, true));
    rhs = separable_axis_values(k, PointwiseMap::separable(hat_axes), dual, qa, true);
    dist = tensor_distance(lhs, rhs, w, keep);
  } else {
    const GridFunction lhs = fourier(apply_hausdorff(k, f.f, spec, quad_for(k, q, false)));
    const PointwiseMap hat = closed ? *f.fourier : InterpolatedMap(fourier(sample(f.f, spec))).as_map();
    const QuadConfig qa = closed ? quad_for(k, q, true) : for_interpolated(quad_for(k, q, true));
    const GridFunction rhs = apply_adjoint(k, hat, dual, qa);
    double d = 0.0, r = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      const auto idx = dual.unflatten(i);
      bool in = true;
      for (std::size_t j = 0; j < n; ++j) in = in && keep[j][idx[j]];
      if (!in) continue;
      d += std::norm(lhs.samples[i] - rhs.samples[i]);
      r += std::norm(rhs.samples[i]);
    }
    dist = {std::sqrt(d * dual.cell_volume()), std::sqrt(r * dual.cell_volume())};
  }
  auto ctx = base_context(k, spec, factored);
  ctx["function"] = f.name;
  ctx["transform"] = closed ? "closed form" : "interpolated";
  ctx["plain_relative"] = json_number(plain(dist.first, dist.second));
  ctx["seconds"] = json_number(elapsed(t0));
  return make_check("fourier_commutation", regularized(dist.first, dist.second), tolerance, ctx);
}

CheckReport check_hilbert_commutation(const Kernel& k, const BatteryFunction& f, std::size_t axis,
                                      const GridSpec& spec, double tolerance, const QuadConfig& q) {
  spec.validate();
  const std::size_t n = spec.dimension();
  if (axis >= n) throw PreconditionError("check_hilbert_commutation: axis out of range");
  const auto t0 = std::chrono::steady_clock::now();
  const bool factored = factorable(k, f.f);
  const auto closed = battery::hilbert_along(f, axis);
  std::pair<double, double> dist;
  if (factored) {
    const QuadConfig qf = quad_for(k, q, false);
    Axes lhs = separable_axis_values(k, f.f, spec, qf, false);
    lhs[axis] = hilbert_axis(GridFunction(axis_spec(spec, axis), lhs[axis]), 0).samples;
    std::vector<PointwiseMap::Axis> parts;
    for (std::size_t j = 0; j < n; ++j) parts.push_back(j == axis ? hilbert_factor(f, j, spec) : f.f.axis(j));
    const Axes rhs = separable_axis_values(k, PointwiseMap::separable(parts), spec, closed ? qf : for_interpolated(qf), false);
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = spec.spacing(j);
    dist = tensor_distance(lhs, rhs, w, {});
  } else {
    const QuadConfig qf = quad_for(k, q, false);
    const GridFunction lhs = hilbert_axis(apply_hausdorff(k, f.f, spec, qf), axis);
    const PointwiseMap hf = closed ? *closed : InterpolatedMap(hilbert_axis(sample(f.f, spec), axis)).as_map();
    const GridFunction rhs = apply_hausdorff(k, hf, spec, closed ? qf : for_interpolated(qf));
    dist = {l2(subtract(lhs, rhs)), l2(rhs)};
  }
  auto ctx = base_context(k, spec, factored);
  ctx["function"] = f.name;
  ctx["axis"] = axis;
  ctx["transform"] = closed ? "closed form" : "interpolated";
  ctx["plain_relative"] = json_number(plain(dist.first, dist.second));
  ctx["seconds"] = json_number(elapsed(t0));
  return make_check("hilbert_commutation", regularized(dist.first, dist.second), tolerance, ctx);
}

std::vector<CheckReport> check_upper_bound(const Kernel& k, double p, const std::vector<BatteryFunction>& battery,
                                           NormKind kind, const GridSpec& spec, double tolerance,
                                           const QuadConfig& q) {
  spec.validate();
  if (kind == NormKind::lp && !(p >= 1.0)) throw PreconditionError("check_upper_bound: p must lie in [1, inf]");
  const double alpha = kind == NormKind::star ? 0.0 : (std::isinf(p) ? 1.0 : 1.0 - 1.0 / p);
  const auto target = moment(k, alpha);
  std::vector<CheckReport> out;
  const QuadConfig qf = quad_for(k, q, false);
  for (const auto& b : battery) {
    const bool factored = factorable(k, b.f);
    double num = 1.0, den = 1.0;
    auto norm_of = [&](const GridFunction& g) { return kind == NormKind::lp ? lp_norm(g, p) : star_norm(g); };
    if (factored) {
      const Axes hf = separable_axis_values(k, b.f, spec, qf, false);
      const Axes fs = axis_samples(b.f, spec);
      for (std::size_t j = 0; j < spec.dimension(); ++j) {
        const GridSpec a = axis_spec(spec, j);
        num *= norm_of(GridFunction(a, hf[j]));
        den *= norm_of(GridFunction(a, fs[j]));
      }
    } else {
      num = norm_of(apply_hausdorff(k, b.f, spec, qf));
      den = norm_of(sample(b.f, spec));
    }
    const double ratio = den > 0.0 ? num / den : 0.0;
    double residual = 0.0;
    if (target.divergent) {
      residual = 0.0;  // no finite bound to exceed
    } else if (target.value > 0.0) {
      residual = std::max(0.0, ratio - target.value) / target.value;
    } else {
      residual = ratio;
    }
    auto ctx = base_context(k, spec, factored);
    ctx["function"] = b.name;
    ctx["norm"] = kind == NormKind::lp ? "lp" : "star";
    ctx["p"] = json_number(kind == NormKind::lp ? p : 1.0);
    ctx["ratio"] = json_number(ratio);
    ctx["target"] = json_number(target.value);
    out.push_back(make_check(kind == NormKind::lp ? "lp_upper_bound" : "star_upper_bound", residual, tolerance, ctx));
  }
  return out;
}

CheckReport check_sup_norm(const Kernel& k, const std::vector<BatteryFunction>& battery, const GridSpec& spec,
                           double tolerance, const QuadConfig& q) {
  const auto reports = check_upper_bound(k, kInfinity, battery, NormKind::lp, spec, tolerance, q);
  double worst = 0.0;
  nlohmann::json members = nlohmann::json::array();
  for (const auto& r : reports) {
    worst = std::max(worst, r.residual);
    members.push_back({{"function", r.context["function"]}, {"ratio", r.context["ratio"]}});
  }
  auto ctx = base_context(k, spec, false);
  ctx.erase("path");
  ctx["target"] = json_number(moment(k, 1.0).value);
  ctx["members"] = members;
  return make_check("sup_norm", worst, tolerance, ctx);
}

}  // namespace hlab
