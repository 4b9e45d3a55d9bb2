// AVX2 variants of the kernel table. Compiled with -mavx2 -mfma and only
// reached through the runtime dispatcher, so the rest of the library stays
// portable baseline x86-64.

#if defined(__AVX2__)

#include <immintrin.h>

#include <cmath>

#include "msi/kernels.hpp"

namespace msi::kernels {

namespace {

// exp(x) for 4 doubles, Cephes-style: reduce x = n*ln2 + r, evaluate a
// rational approximation of exp(r) on |r| <= ln2/2, rebuild with 2^n via
// the exponent bits. ~2 ulp, which the scalar-vs-simd equivalence tests
// bound at the call sites. Arguments below -708 flush to 0 like std::exp
// (modulo subnormals, which the Gaussian kernels never depend on).
inline __m256d exp_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);

  __m256d underflow = _mm256_cmp_pd(x, _mm256_set1_pd(-708.0), _CMP_LT_OQ);
  x = _mm256_max_pd(x, _mm256_set1_pd(-708.0));
  x = _mm256_min_pd(x, _mm256_set1_pd(708.0));

  __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                              _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  x = _mm256_fnmadd_pd(n, c1, x);
  x = _mm256_fnmadd_pd(n, c2, x);

  __m256d xx = _mm256_mul_pd(x, x);
  __m256d px = _mm256_set1_pd(1.26177193074810590878e-4);
  px = _mm256_fmadd_pd(px, xx, _mm256_set1_pd(3.02994407707441961300e-2));
  px = _mm256_fmadd_pd(px, xx, _mm256_set1_pd(9.99999999999999999910e-1));
  px = _mm256_mul_pd(px, x);

  __m256d qx = _mm256_set1_pd(3.00198505138664455042e-6);
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.52448340349684104192e-3));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.27265548208155028766e-1));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.00000000000000000005e0));

  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

  __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  n64 = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
  n64 = _mm256_slli_epi64(n64, 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(n64));

  return _mm256_andnot_pd(underflow, e);
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swap = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swap));
}

double dot_avx2(const double* a, const double* b, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_avx2(const double* a, size_t n) {
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

double sum_sq_dev_avx2(const double* a, size_t n, double center) {
  __m256d c = _mm256_set1_pd(center);
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), c);
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    double d = a[i] - center;
    s += d * d;
  }
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, size_t n) {
  __m256d al = _mm256_set1_pd(alpha);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_fmadd_pd(al, _mm256_loadu_pd(x + i),
                                _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, v);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void shift_scale_avx2(double* a, size_t n, double shift, double scale) {
  __m256d sh = _mm256_set1_pd(shift);
  __m256d sc = _mm256_set1_pd(scale);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_mul_pd(_mm256_add_pd(_mm256_loadu_pd(a + i), sh), sc);
    _mm256_storeu_pd(a + i, v);
  }
  for (; i < n; ++i) a[i] = (a[i] + shift) * scale;
}

double gauss_sum_avx2(const double* xs, size_t n, double center, double inv_h) {
  __m256d c = _mm256_set1_pd(center);
  __m256d ih = _mm256_set1_pd(inv_h);
  __m256d mhalf = _mm256_set1_pd(-0.5);
  __m256d acc = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_mul_pd(_mm256_sub_pd(c, _mm256_loadu_pd(xs + i)), ih);
    acc = _mm256_add_pd(acc, exp_pd(_mm256_mul_pd(mhalf, _mm256_mul_pd(t, t))));
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    double t = (center - xs[i]) * inv_h;
    s += std::exp(-0.5 * t * t);
  }
  return s;
}

void gauss_weights_avx2(const double* grid, size_t g, double x, double inv_h,
                        double* out) {
  __m256d c = _mm256_set1_pd(x);
  __m256d ih = _mm256_set1_pd(inv_h);
  __m256d mhalf = _mm256_set1_pd(-0.5);
  size_t j = 0;
  for (; j + 4 <= g; j += 4) {
    __m256d t = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(grid + j), c), ih);
    _mm256_storeu_pd(out + j,
                     exp_pd(_mm256_mul_pd(mhalf, _mm256_mul_pd(t, t))));
  }
  for (; j < g; ++j) {
    double t = (grid[j] - x) * inv_h;
    out[j] = std::exp(-0.5 * t * t);
  }
}

}  // namespace

const KernelTable* avx2_table_impl() {
  static const KernelTable table = {
      "avx2",          dot_avx2,         sum_avx2, sum_sq_dev_avx2,
      axpy_avx2,       shift_scale_avx2, gauss_sum_avx2,
      gauss_weights_avx2};
  return &table;
}

}  // namespace msi::kernels

#else

namespace msi::kernels {
struct KernelTable;
const KernelTable* avx2_table_impl() { return nullptr; }
}  // namespace msi::kernels

#endif
