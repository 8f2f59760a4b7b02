#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hlab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Closed interval [lo, hi] of the dilation variable, 0 <= lo < hi <= inf.
struct AxisRange {
  double lo = 0.0;
  double hi = kInfinity;
};

// A dilation kernel on (0, inf)^n. Immutable; copies share state.
class Kernel {
 public:
  using Point = std::span<const double>;
  using Evaluator = std::function<double(Point)>;
  using Factor = std::function<double(double)>;

  struct Parts {
    std::size_t dimension = 1;
    Evaluator evaluator;  // may be left empty when factors are given
    std::optional<std::vector<AxisRange>> support;
    std::optional<std::vector<Factor>> factors;
    // Points (in t) where a factor has a kink or jump, or that mark its scale.
    std::vector<std::vector<double>> breakpoints;
    bool nonnegative = true;
    std::string label;
  };

  explicit Kernel(Parts parts);

  std::size_t dimension() const { return parts_->dimension; }
  // Zero outside the declared support.
  double operator()(Point t) const;
  bool separable() const { return parts_->factors.has_value(); }
  // One-dimensional factor on axis j, zero outside the axis range.
  double factor(std::size_t j, double t) const;
  const std::optional<std::vector<AxisRange>>& support() const { return parts_->support; }
  AxisRange axis_range(std::size_t j) const;
  std::span<const double> breakpoints(std::size_t j) const;
  bool nonnegative() const { return parts_->nonnegative; }
  const std::string& label() const { return parts_->label; }
  const Parts& parts() const { return *parts_; }

 private:
  std::shared_ptr<const Parts> parts_;
};

struct MomentReport {
  double value = 0.0;  // +inf when divergent
  double error_estimate = 0.0;
  std::vector<double> alpha;
  bool converged = false;
  bool divergent = false;
  std::size_t evaluations = 0;
};

// Families: box [b], hardy, adjoint_hardy [b], exp [lambda], power_box beta [b], bump w [c].
Kernel make_named_kernel(std::string_view name, std::span<const double> params, std::size_t n);
std::vector<std::string> registry_names();

// Integral of phi(t) prod t_j^{-alpha_j} over (0, inf)^n, alpha_j in [0, 1].
MomentReport moment(const Kernel& k, std::span<const double> alpha, double tol = 1e-10);
MomentReport moment(const Kernel& k, double alpha, double tol = 1e-10);
// Same integral through nested adaptive quadrature on the full evaluator,
// ignoring separable structure. Used as an independent check.
MomentReport moment_nested(const Kernel& k, std::span<const double> alpha, double tol = 1e-8);
// No range restriction on alpha; partial moments over prod (0, upper_j] when
// upper is given.
MomentReport moment_general(const Kernel& k, std::span<const double> alpha, double tol,
                            std::span<const double> upper = {});

// phi(1/t) / prod t.
Kernel reflect(const Kernel& k);
// phi restricted to [delta, 1]^n; requires phi to vanish outside (0, 1]^n.
Kernel truncate_inner(const Kernel& k, double delta);
// phi(m t) restricted to (0, 1)^n.
Kernel truncate_scaled(const Kernel& k, double m);
// phi restricted to the box.
Kernel restrict_to(const Kernel& k, std::vector<AxisRange> box);
Kernel kernel_sum(const Kernel& a, const Kernel& b);
Kernel scaled(const Kernel& k, double c);
Kernel zero_kernel(std::size_t n);

// Normalized C-infinity bump exp(-1/(1-x^2)) / Z on [-1, 1].
double standard_bump(double x);

}  // namespace hlab
