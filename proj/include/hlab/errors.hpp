#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace hlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A sampled map returned NaN or an infinity.
class NonFiniteSample : public Error {
 public:
  NonFiniteSample(std::vector<double> node, std::complex<double> value);
  const std::vector<double>& node() const noexcept { return node_; }
  std::complex<double> value() const noexcept { return value_; }

 private:
  std::vector<double> node_;
  std::complex<double> value_;
};

// Adaptive quadrature at one evaluation point failed to reach its tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(std::vector<double> node, std::complex<double> partial, double error_estimate);
  const std::vector<double>& node() const noexcept { return node_; }
  std::complex<double> partial() const noexcept { return partial_; }
  double error_estimate() const noexcept { return error_; }

 private:
  std::vector<double> node_;
  std::complex<double> partial_;
  double error_;
};

// Wrap-around energy on the log-radial grid exceeded its threshold.
class AliasingError : public Error {
 public:
  AliasingError(double leaked, double threshold);
  double leaked() const noexcept { return leaked_; }

 private:
  double leaked_;
};

std::string format_node(const std::vector<double>& node);

}  // namespace hlab
