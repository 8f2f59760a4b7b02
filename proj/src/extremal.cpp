#include "hlab/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>

#include <boost/math/special_functions/beta.hpp>

#include "hlab/errors.hpp"
#include "hlab/parallel.hpp"
#include "hlab/quadrature.hpp"
#include "hlab/transforms.hpp"

namespace hlab {

namespace {

void check_schedule(std::span<const double> eps) {
  if (eps.empty()) throw ConfigError("epsilon schedule is empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !std::isfinite(eps[i])) throw PreconditionError("epsilon values must be positive");
    if (i > 0 && !(eps[i] < eps[i - 1])) throw PreconditionError("epsilon schedule must be strictly decreasing");
  }
}

double log_or_inf(double t) {
  if (t <= 0.0) return -kInfinity;
  if (!std::isfinite(t)) return kInfinity;
  return std::log(t);
}

// Partial moments int_0^r phi_j(t) t^-alpha dt of one axis factor, in s = log t.
class AxisPartialMoment {
 public:
  AxisPartialMoment(const Kernel& k, std::size_t j, double alpha, double tol) : k_(k), j_(j), alpha_(alpha) {
    const AxisRange r = k.axis_range(j);
    s_lo_ = log_or_inf(r.lo);
    s_hi_ = log_or_inf(r.hi);
    for (double b : k.breakpoints(j))
      if (b > 0.0 && std::isfinite(b)) anchors_.push_back(std::log(b));
    for (double e : {s_lo_, s_hi_})
      if (std::isfinite(e)) anchors_.push_back(e);
    if (anchors_.empty()) anchors_.push_back(0.0);
    std::sort(anchors_.begin(), anchors_.end());
    opt_.abs_tol = tol * 1e-3;
    opt_.rel_tol = tol;
    opt_.max_subdivisions = 400;
  }

  // Returns value and error for the integral up to log r = u.
  quad::Estimate<double> at(double u) const {
    if (u <= s_lo_) return {};
    const double hi = std::min(u, s_hi_);
    std::vector<double> marks;
    for (double a : anchors_)
      if (a < hi) marks.push_back(a);
    marks.push_back(hi);
    return quad::integrate_line<double>(integrand(), s_lo_, hi, marks, opt_);
  }
  quad::Estimate<double> total() const { return quad::integrate_line<double>(integrand(), s_lo_, s_hi_, anchors_, opt_); }

  double s_lo() const { return s_lo_; }
  const std::vector<double>& anchors() const { return anchors_; }

 private:
  std::function<double(double)> integrand() const {
    return [this](double s) { return k_.factor(j_, std::exp(s)) * std::exp((1.0 - alpha_) * s); };
  }
  Kernel k_;
  std::size_t j_;
  double alpha_;
  double s_lo_ = -kInfinity, s_hi_ = kInfinity;
  std::vector<double> anchors_;
  quad::LineOptions opt_;
};

struct AxisRatio {
  double value = 0.0;       // ratio^p along this axis
  double rel_error = 0.0;   // relative error of value
  bool converged = true;
};

// (p eps / 2) * 2 int e^{-p eps u} |P(e^u)|^p du, the p-th power of the one-axis ratio.
AxisRatio axis_ratio(const Kernel& k, std::size_t j, double p, double eps, const LpSweepOptions& opt) {
  const double alpha = 1.0 - 1.0 / p - eps;
  const AxisPartialMoment P(k, j, alpha, opt.tolerance * 1e-2);
  const auto whole = P.total();
  if (whole.divergent || !std::isfinite(whole.value)) throw PreconditionError("lp sweep: partial moments diverge");
  const double U = opt.radius_power * std::log(1.0 / eps);
  AxisRatio out;
  out.converged = whole.converged;

  double core = 0.0, core_err = 0.0, at_R = 0.0;
  if (U > P.s_lo()) {
    std::vector<double> marks;
    for (double a : P.anchors())
      if (a < U) marks.push_back(a);
    marks.push_back(U);
    bool inner_ok = true;
    auto g = [&](double u) {
      const auto v = P.at(u);
      inner_ok = inner_ok && v.converged;
      return std::exp(-p * eps * u) * std::pow(std::abs(v.value), p);
    };
    quad::LineOptions lo;
    lo.abs_tol = 1e-2 * opt.tolerance * std::max(1e-300, std::pow(std::abs(whole.value), p));
    lo.rel_tol = opt.tolerance;
    lo.max_subdivisions = 400;
    const auto est = quad::integrate_line<double>(g, P.s_lo(), U, marks, lo);
    core = 2.0 * est.value;
    core_err = 2.0 * est.error;
    out.converged = out.converged && est.converged && inner_ok;
    at_R = std::abs(P.at(U).value);
  }
  // beyond R the partial moment sits between P(R) and its limit
  const double decay = 2.0 * std::exp(-p * eps * U) / (p * eps);
  const double a = decay * std::pow(std::min(at_R, std::abs(whole.value)), p);
  const double b = decay * std::pow(std::max(at_R, std::abs(whole.value)), p);
  const double num = core + 0.5 * (a + b);
  out.value = 0.5 * p * eps * num;
  out.rel_error = num > 0.0 ? (core_err + 0.5 * (b - a)) / num + 1e-2 * opt.tolerance : 0.0;
  return out;
}

}  // namespace

LpExtremal lp_extremal(double epsilon, double p, std::size_t n) {
  if (!(epsilon > 0.0)) throw PreconditionError("lp_extremal: epsilon must be positive");
  if (!(p >= 1.0) || !std::isfinite(p)) throw PreconditionError("lp_extremal: p must lie in [1, inf)");
  if (n == 0) throw PreconditionError("lp_extremal: dimension must be positive");
  const double power = -1.0 / p - epsilon;
  std::vector<PointwiseMap::Axis> axes(
      n, PointwiseMap::Axis{[power](double x) { return Complex(std::abs(x) >= 1.0 ? std::pow(std::abs(x), power) : 0.0); },
                            {-1.0, 1.0}});
  return {PointwiseMap::separable(std::move(axes)), std::pow(2.0 / (p * epsilon), static_cast<double>(n) / p)};
}

double extrapolate_eps_log(std::span<const double> eps, std::span<const double> ratio) {
  if (eps.size() != ratio.size() || eps.empty()) throw PreconditionError("extrapolation needs matching data");
  if (eps.size() == 1) return ratio[0];
  // the two smallest epsilons
  std::size_t i = 0, k = 1;
  if (eps[k] < eps[i]) std::swap(i, k);
  for (std::size_t m = 2; m < eps.size(); ++m) {
    if (eps[m] < eps[i]) {
      k = i;
      i = m;
    } else if (eps[m] < eps[k]) {
      k = m;
    }
  }
  auto basis = [](double e) { return e * std::log(1.0 / e); };
  const double bi = basis(eps[i]), bk = basis(eps[k]);
  if (bi == bk) return ratio[i];
  const double slope = (ratio[i] - ratio[k]) / (bi - bk);
  return ratio[i] - slope * bi;
}

SweepResult lp_lower_bound_sweep(const Kernel& k, double p, std::span<const double> eps_schedule,
                                 const LpSweepOptions& opt) {
  check_schedule(eps_schedule);
  if (!(p >= 1.0) || !std::isfinite(p)) throw PreconditionError("lp sweep: p must lie in [1, inf)");
  if (!k.separable()) throw PreconditionError("lp sweep: the closed-form reduction needs a separable kernel");
  const std::size_t n = k.dimension();
  SweepResult out;
  const auto target = moment(k, 1.0 - 1.0 / p, opt.tolerance);
  if (target.divergent || !std::isfinite(target.value)) throw PreconditionError("lp sweep: target moment diverges");
  out.target = target.value;

  const std::size_t m = eps_schedule.size();
  out.entries.resize(m);
  std::vector<char> ok(m, 1);
  parallel_for(m, [&](std::size_t i) {
    const double eps = eps_schedule[i];
    double power = 1.0, rel = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const auto a = axis_ratio(k, j, p, eps, opt);
      power *= a.value;
      rel += a.rel_error;
      ok[i] = ok[i] && a.converged;
    }
    SweepEntry& e = out.entries[i];
    e.epsilon = eps;
    e.ratio = std::pow(power, 1.0 / p);
    e.diagnostics = e.ratio * rel / p;
    const std::vector<double> alpha(n, 1.0 - 1.0 / p - eps), upper(n, 1.0 / eps);
    const auto partial = moment_general(k, alpha, opt.tolerance, upper);
    e.lower_bound = std::pow(eps, static_cast<double>(n) * eps) * partial.value;
    e.upper_bound = out.target;
    e.diagnostics += partial.error_estimate;
    ok[i] = ok[i] && partial.converged;
  });

  bool sandwich = true, monotone = true;
  std::vector<double> eps(m), ratio(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& e = out.entries[i];
    eps[i] = e.epsilon;
    ratio[i] = e.ratio;
    if (e.ratio < e.lower_bound - e.diagnostics) {
      sandwich = false;
      out.notes.push_back("ratio below the lower bound at eps=" + format_number(e.epsilon));
    }
    if (e.ratio > e.upper_bound * (1.0 + opt.slack)) {
      sandwich = false;
      out.notes.push_back("ratio above the target at eps=" + format_number(e.epsilon));
    }
    if (i > 0 && e.ratio + e.diagnostics < out.entries[i - 1].ratio - out.entries[i - 1].diagnostics) monotone = false;
    if (!ok[i]) out.notes.push_back("quadrature did not converge at eps=" + format_number(e.epsilon));
  }
  if (!monotone) out.notes.push_back("ratios not monotone in eps; refine the tolerance");
  out.extrapolated = extrapolate_eps_log(eps, ratio);
  out.converged = sandwich && std::isfinite(out.extrapolated) &&
                  std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
  return out;
}

PointwiseMap h1_extremal(double epsilon, std::size_t n) {
  if (!(epsilon > 0.0)) throw PreconditionError("h1_extremal: epsilon must be positive");
  if (n == 0) throw PreconditionError("h1_extremal: dimension must be positive");
  auto axis = [epsilon](double x) {
    const double theta = std::atan2(1.0, x);  // arg(x + i) in (0, pi)
    return std::pow(x * x + 1.0, -0.5 * (1.0 + epsilon)) * std::exp(Complex(0.0, -(1.0 + epsilon) * theta));
  };
  return PointwiseMap::separable(std::vector<PointwiseMap::Axis>(n, PointwiseMap::Axis{axis, {}}));
}

H1SweepOptions H1SweepOptions::for_dimension(std::size_t n) {
  H1SweepOptions o;
  if (n >= 2) {
    o.half_width = 64.0;
    o.points = 1024;
  }
  return o;
}

SweepResult h1_lower_bound_sweep(const Kernel& k, double delta, std::span<const double> eps_schedule,
                                 const H1SweepOptions& opt) {
  check_schedule(eps_schedule);
  const std::size_t n = k.dimension();
  const Kernel truncated = truncate_inner(k, delta);
  const auto mass = moment(truncated, 0.0);
  if (mass.divergent) throw PreconditionError("h1 sweep: truncated kernel has infinite mass");
  SweepResult out;
  out.target = mass.value;
  const GridSpec spec = GridSpec::uniform(n, opt.half_width, opt.points);

  for (double eps : eps_schedule) {
    const PointwiseMap f = h1_extremal(eps, n);
    const GridFunction fg = sample(f, spec);
    const GridFunction hf = apply_hausdorff(truncated, f, spec, opt.quad);
    const double denom = star_norm(fg);
    const double r = star_norm(subtract(hf, scale(fg, mass.value))) / denom;
    // share of the L1 mass of |f| that the box misses
    const double total = boost::math::beta(0.5, 0.5 * eps);
    quad::Options qo;
    qo.abs_tol = 1e-14;
    qo.rel_tol = 1e-12;
    const double inside =
        2.0 * quad::adaptive<double>([eps](double x) { return std::pow(x * x + 1.0, -0.5 * (1.0 + eps)); }, 0.0,
                                     opt.half_width, qo)
                  .value;
    SweepEntry e;
    e.epsilon = eps;
    e.ratio = r;
    e.lower_bound = mass.value - r;
    e.upper_bound = mass.value;
    e.diagnostics = 1.0 - std::pow(inside / total, static_cast<double>(n));
    out.entries.push_back(e);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < out.entries.size(); ++i)
    if (!(out.entries[i].ratio < out.entries[i - 1].ratio)) decreasing = false;
  if (!decreasing) out.notes.push_back("residual not strictly decreasing; attributed to grid resolution");
  out.extrapolated = out.entries.back().lower_bound;
  out.converged = decreasing && std::isfinite(out.extrapolated);
  return out;
}

WitnessOptions WitnessOptions::for_dimension(std::size_t n) {
  WitnessOptions o;
  if (n >= 2) {
    o.half_width = 32.0;
    o.points = 2048;
  }
  return o;
}

std::pair<double, double> necessary_condition_witness(const Kernel& k, const WitnessOptions& opt) {
  const std::size_t n = k.dimension();
  const GridSpec spec = GridSpec::uniform(n, opt.half_width, opt.points);
  auto f = [](double x) { return Complex(x / ((1.0 + x * x) * (1.0 + x * x))); };
  const PointwiseMap map = PointwiseMap::separable(std::vector<PointwiseMap::Axis>(n, PointwiseMap::Axis{f, {}}));
  const auto mass = moment(k, 0.0);
  const double rhs = std::pow(0.5, static_cast<double>(n)) * mass.value;
  std::vector<std::vector<Complex>> axes;
  if (k.separable()) {
    axes = separable_axis_values(k, map, spec, opt.quad, false);
  }
  // positive orthant only: the positive half of each axis
  double lhs = 0.0;
  if (!axes.empty()) {
    lhs = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = spec.points[j] / 2; i < spec.points[j]; ++i) s += axes[j][i].real();
      lhs *= s * spec.spacing(j);
    }
  } else {
    const GridFunction h = apply_hausdorff(k, map, spec, opt.quad);
    for (std::size_t i = 0; i < h.size(); ++i) {
      const auto x = spec.node(i);
      if (std::all_of(x.begin(), x.end(), [](double v) { return v > 0.0; })) lhs += h.samples[i].real();
    }
    lhs *= spec.cell_volume();
  }
  return {lhs, rhs};
}

std::vector<CheckReport> scaling_check(const GridFunction& g, long m) {
  if (m < 1) throw PreconditionError("scaling_check: the dilation must be a positive integer");
  g.spec.validate();
  const std::size_t n = g.spec.dimension();
  GridSpec wide = g.spec;
  for (auto& L : wide.half_width) L *= static_cast<double>(m);
  // nodes of the wide grid are m times the original ones, so g(x/m) has the same samples
  const GridFunction dilated(wide, g.samples);
  const double factor = std::pow(static_cast<double>(m), static_cast<double>(n));
  auto relative = [](double a, double b) {
    if (a == b) return 0.0;
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
  };
  const double l1 = lp_norm(g, 1.0), l1_wide = lp_norm(dilated, 1.0);
  const double star = star_norm(g), star_wide = star_norm(dilated);
  nlohmann::json ctx = {{"m", m}, {"dimension", n}};
  ctx["l1"] = json_number(l1);
  ctx["l1_dilated"] = json_number(l1_wide);
  ctx["star"] = json_number(star);
  ctx["star_dilated"] = json_number(star_wide);
  return {make_check("scaling_l1", relative(l1_wide, factor * l1), 1e-12, ctx),
          make_check("scaling_star", relative(star_wide, factor * star), 1e-2, ctx)};
}

void write_sweep_csv(const SweepResult& r, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "epsilon,ratio,lower_bound,upper_bound,diagnostics\n";
  for (const auto& e : r.entries)
    out << format_number(e.epsilon) << ',' << format_number(e.ratio) << ',' << format_number(e.lower_bound) << ','
        << format_number(e.upper_bound) << ',' << format_number(e.diagnostics) << '\n';
  if (!r.entries.empty()) {
    // Closing row: the eps -> 0 limit. Best lower bound seen, target, and the jump from the last ratio.
    double best = -kInfinity;
    for (const auto& e : r.entries) best = std::max(best, e.lower_bound);
    out << "0," << format_number(r.extrapolated) << ',' << format_number(best) << ',' << format_number(r.target) << ','
        << format_number(std::abs(r.extrapolated - r.entries.back().ratio)) << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace hlab
