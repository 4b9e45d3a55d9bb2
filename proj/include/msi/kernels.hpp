#pragma once

#include <cstddef>
#include <string>

namespace msi::kernels {

// Data-parallel inner loops used by the CA normalization, inertia sums and
// the kernel density estimators. Two implementations share this table: a
// scalar reference (the semantic definition, plain std::exp loops) and an
// AVX2 variant selected at runtime when the CPU supports it. The variants
// are equivalence-tested against each other; the active choice is recorded
// in run manifests so a run can be reproduced bit-exactly.
struct KernelTable {
  const char* name;

  double (*dot)(const double* a, const double* b, size_t n);
  double (*sum)(const double* a, size_t n);
  // Sum of squared deviations from `center`.
  double (*sum_sq_dev)(const double* a, size_t n, double center);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, size_t n);
  // a[i] = (a[i] + shift) * scale
  void (*shift_scale)(double* a, size_t n, double shift, double scale);
  // sum_i exp(-0.5 * ((center - xs[i]) * inv_h)^2)
  double (*gauss_sum)(const double* xs, size_t n, double center, double inv_h);
  // out[j] = exp(-0.5 * ((grid[j] - x) * inv_h)^2)
  void (*gauss_weights)(const double* grid, size_t g, double x, double inv_h,
                        double* out);
};

const KernelTable& scalar_table();
// nullptr when the CPU lacks AVX2.
const KernelTable* avx2_table();

// Active table. Defaults to the best supported variant.
const KernelTable& active();
// which: "auto" | "scalar" | "avx2". Throws DataError for unknown names or
// an unsupported explicit request.
void select(const std::string& which);
std::string active_name();

}  // namespace msi::kernels
