#include "hlab/errors.hpp"

#include <sstream>

namespace hlab {

std::string format_node(const std::vector<double>& node) {
  std::ostringstream os;
  os.precision(12);
  os << '(';
  for (std::size_t j = 0; j < node.size(); ++j) os << (j ? ", " : "") << node[j];
  os << ')';
  return os.str();
}

namespace {
std::string complex_text(std::complex<double> v) {
  std::ostringstream os;
  os.precision(12);
  os << v.real() << (v.imag() < 0 ? "-" : "+") << std::abs(v.imag()) << 'i';
  return os.str();
}
std::string number_text(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}
}  // namespace

NonFiniteSample::NonFiniteSample(std::vector<double> node, std::complex<double> value)
    : Error("non-finite sample " + complex_text(value) + " at node " + format_node(node)),
      node_(std::move(node)),
      value_(value) {}

QuadratureError::QuadratureError(std::vector<double> node, std::complex<double> partial,
                                 double error_estimate)
    : Error("quadrature did not converge at node " + format_node(node) + " (partial value " +
            complex_text(partial) + ", error estimate " + number_text(error_estimate) + ")"),
      node_(std::move(node)),
      partial_(partial),
      error_(error_estimate) {}

AliasingError::AliasingError(double leaked, double threshold)
    : Error("log-grid wrap-around energy " + number_text(leaked) + " exceeds threshold " +
            number_text(threshold)),
      leaked_(leaked) {}

}  // namespace hlab
