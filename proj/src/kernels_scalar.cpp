#include <cmath>

#include "msi/kernels.hpp"

namespace msi::kernels {

namespace {

double dot_scalar(const double* a, const double* b, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_scalar(const double* a, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

double sum_sq_dev_scalar(const double* a, size_t n, double center) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double d = a[i] - center;
    s += d * d;
  }
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void shift_scale_scalar(double* a, size_t n, double shift, double scale) {
  for (size_t i = 0; i < n; ++i) a[i] = (a[i] + shift) * scale;
}

double gauss_sum_scalar(const double* xs, size_t n, double center,
                        double inv_h) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double t = (center - xs[i]) * inv_h;
    s += std::exp(-0.5 * t * t);
  }
  return s;
}

void gauss_weights_scalar(const double* grid, size_t g, double x, double inv_h,
                          double* out) {
  for (size_t j = 0; j < g; ++j) {
    double t = (grid[j] - x) * inv_h;
    out[j] = std::exp(-0.5 * t * t);
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table = {
      "scalar",          dot_scalar,       sum_scalar, sum_sq_dev_scalar,
      axpy_scalar,       shift_scale_scalar, gauss_sum_scalar,
      gauss_weights_scalar};
  return table;
}

}  // namespace msi::kernels
