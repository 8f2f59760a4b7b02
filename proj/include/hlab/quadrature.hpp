#pragma once

// Globally adaptive Gauss-Kronrod (7/15) integration on finite intervals and
// on half-lines / lines via geometric tail doubling.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <valarray>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace hlab::quad {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }
inline double magnitude(const std::valarray<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

template <class T>
struct Estimate {
  T value{};
  double error = 0.0;
  bool converged = true;
  bool divergent = false;
  std::size_t evaluations = 0;
};

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  std::size_t max_subdivisions = 200;
};

struct LineOptions {
  double abs_tol = 1e-10;
  double rel_tol = 0.0;
  std::size_t max_subdivisions = 200;
  // Largest |coordinate| a tail may reach before the integral is declared divergent.
  double limit = 700.0;
};

namespace detail {

template <class T>
struct Panel {
  double a;
  double b;
  T value;
  double error;
  bool splittable;
};

template <class T, class F>
Panel<T> kronrod15(F& f, double a, double b) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
  using Gauss = boost::math::quadrature::gauss<double, 7>;
  static const auto& xk = Kronrod::abscissa();
  static const auto& wk = Kronrod::weights();
  static const auto& wg = Gauss::weights();

  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  std::array<T, 15> fv;
  fv[0] = f(c);
  for (int i = 1; i < 8; ++i) {
    fv[2 * i - 1] = f(c - r * xk[i]);
    fv[2 * i] = f(c + r * xk[i]);
  }
  T kron = fv[0] * wk[0];
  T gauss = fv[0] * wg[0];
  double resabs = wk[0] * magnitude(fv[0]);
  for (int i = 1; i < 8; ++i) {
    T pair = fv[2 * i - 1] + fv[2 * i];
    kron += pair * wk[i];
    if (i % 2 == 0) gauss += pair * wg[i / 2];
    resabs += wk[i] * (magnitude(fv[2 * i - 1]) + magnitude(fv[2 * i]));
  }
  const T mean = kron * 0.5;
  double resasc = wk[0] * magnitude(T(fv[0] - mean));
  for (int i = 1; i < 8; ++i)
    resasc += wk[i] * (magnitude(T(fv[2 * i - 1] - mean)) + magnitude(T(fv[2 * i] - mean)));

  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();
  double err = magnitude(T(kron - gauss)) * std::abs(r);
  resabs *= std::abs(r);
  resasc *= std::abs(r);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > tiny / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();

  const bool splittable = std::abs(b - a) > 64.0 * eps * std::max({1.0, std::abs(a), std::abs(b)});
  return {a, b, T(kron * r), err, splittable};
}

}  // namespace detail

// Integrates f over [a, b], splitting first at the given breakpoints.
template <class T, class F>
Estimate<T> adaptive(F&& f, double a, double b, const Options& opt,
                     std::span<const double> breaks = {}) {
  using detail::Panel;
  std::vector<double> edges{a};
  for (double x : breaks)
    if (x > a && x < b) edges.push_back(x);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  auto by_error = [](const Panel<T>& l, const Panel<T>& r) {
    if (l.error != r.error) return l.error < r.error;
    return l.a > r.a;
  };
  std::vector<Panel<T>> heap;
  std::vector<Panel<T>> settled;
  Estimate<T> out;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    Panel<T> p = detail::kronrod15<T>(f, edges[i], edges[i + 1]);
    out.evaluations += 15;
    (p.splittable ? heap : settled).push_back(std::move(p));
  }
  std::make_heap(heap.begin(), heap.end(), by_error);

  auto totals = [&](T& value, double& error) {
    std::vector<const Panel<T>*> all;
    all.reserve(heap.size() + settled.size());
    for (const auto& p : heap) all.push_back(&p);
    for (const auto& p : settled) all.push_back(&p);
    std::sort(all.begin(), all.end(), [](const Panel<T>* l, const Panel<T>* r) { return l->a < r->a; });
    error = 0.0;
    bool first = true;
    for (const auto* p : all) {
      if (first) {
        value = p->value;
        first = false;
      } else {
        value += p->value;
      }
      error += p->error;
    }
    if (first) value = T(f(a) * 0.0);
  };

  double running_error = 0.0;
  for (const auto& p : heap) running_error += p.error;
  for (const auto& p : settled) running_error += p.error;

  T value{};
  double error = 0.0;
  for (;;) {
    totals(value, error);
    running_error = error;
    const double target = std::max(opt.abs_tol, opt.rel_tol * magnitude(value));
    if (error <= target) {
      out.converged = true;
      break;
    }
    if (heap.empty() || heap.size() + settled.size() >= opt.max_subdivisions) {
      out.converged = false;
      break;
    }
    // Refine greedily until the running estimate suggests convergence, then
    // recompute the totals in positional order.
    while (!heap.empty() && heap.size() + settled.size() < opt.max_subdivisions &&
           running_error > target) {
      std::pop_heap(heap.begin(), heap.end(), by_error);
      Panel<T> worst = std::move(heap.back());
      heap.pop_back();
      const double mid = 0.5 * (worst.a + worst.b);
      Panel<T> left = detail::kronrod15<T>(f, worst.a, mid);
      Panel<T> right = detail::kronrod15<T>(f, mid, worst.b);
      out.evaluations += 30;
      running_error += left.error + right.error - worst.error;
      for (Panel<T>* p : {&left, &right}) {
        if (p->splittable) {
          heap.push_back(std::move(*p));
          std::push_heap(heap.begin(), heap.end(), by_error);
        } else {
          settled.push_back(std::move(*p));
        }
      }
    }
  }
  out.value = value;
  out.error = error;
  return out;
}

// Integrates f over (lo, hi) where either end may be infinite. A finite core
// spanning the anchors is integrated first; infinite ends are covered by tail
// pieces of doubling width until a piece contributes less than abs_tol / 10.
template <class T, class F>
Estimate<T> integrate_line(F&& f, double lo, double hi, std::span<const double> anchors,
                           const LineOptions& opt) {
  Estimate<T> out;
  if (!(lo < hi)) {
    out.value = T(f(0.5 * (lo + hi)) * 0.0);
    return out;
  }
  const bool lo_open = !std::isfinite(lo);
  const bool hi_open = !std::isfinite(hi);
  std::vector<double> inside;
  for (double x : anchors)
    if (std::isfinite(x) && x > lo && x < hi) inside.push_back(x);
  std::vector<double> pts = inside;
  if (!lo_open) pts.push_back(lo);
  if (!hi_open) pts.push_back(hi);
  if (pts.empty()) pts.push_back(0.0);
  const auto [pmin, pmax] = std::minmax_element(pts.begin(), pts.end());
  const double core_lo = lo_open ? *pmin - 1.0 : lo;
  const double core_hi = hi_open ? *pmax + 1.0 : hi;

  const double tol = opt.abs_tol;
  Options core_opt{(lo_open || hi_open) ? tol / 4.0 : tol, opt.rel_tol, opt.max_subdivisions};
  Estimate<T> core = adaptive<T>(f, core_lo, core_hi, core_opt, inside);
  out.value = core.value;
  out.error = core.error;
  out.converged = core.converged;
  out.evaluations = core.evaluations;

  auto tail = [&](double start, double direction) {
    double x = start;
    double w = 1.0;
    for (int k = 0;; ++k) {
      if (std::abs(x) > opt.limit) {
        out.converged = false;
        out.divergent = true;
        return;
      }
      const double tol_k = tol / (8.0 * std::ldexp(1.0, k));
      const double a = direction > 0 ? x : x - w;
      const double b = direction > 0 ? x + w : x;
      Options piece_opt{tol_k, opt.rel_tol, opt.max_subdivisions};
      Estimate<T> piece = adaptive<T>(f, a, b, piece_opt);
      out.value += piece.value;
      out.error += piece.error;
      out.evaluations += piece.evaluations;
      if (!piece.converged) out.converged = false;
      const double size = magnitude(piece.value);
      if (!std::isfinite(size)) {
        out.converged = false;
        out.divergent = true;
        return;
      }
      if (piece.converged && size < tol / 10.0) {
        out.error += size;
        return;
      }
      x = direction > 0 ? b : a;
      w *= 2.0;
    }
  };
  if (hi_open) tail(core_hi, +1.0);
  if (lo_open) tail(core_lo, -1.0);
  if (out.error > std::max(tol, opt.rel_tol * magnitude(out.value))) out.converged = false;
  return out;
}

}  // namespace hlab::quad
