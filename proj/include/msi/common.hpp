#pragma once

#include <stdexcept>
#include <string>

namespace msi {

// Bad or missing input data. CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (non-convergence, degenerate decomposition). Exit code 3.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
  NumericalError(const std::string& msg, double residual)
      : std::runtime_error(msg), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_ = 0.0;
};

}  // namespace msi
