#include <immintrin.h>

#include "longadapt/kernels.hpp"

namespace longadapt::kernels::avx2 {

namespace {
inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}
}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double r = hsum(acc);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double sum(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double r = hsum(acc);
  for (; i < n; ++i) r += a[i];
  return r;
}

double sumsq(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(a + i);
    acc = _mm256_fmadd_pd(v, v, acc);
  }
  double r = hsum(acc);
  for (; i < n; ++i) r += a[i] * a[i];
  return r;
}

double weighted_sum(const double* w, const double* x, std::size_t n) {
  return dot(w, x, n);
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double r = hsum(acc);
  for (; i < n; ++i) {
    double d = a[i] - b[i];
    r += d * d;
  }
  return r;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void standardize(const double* x, const double* mean, const double* inv_sd,
                 const std::uint8_t* mask, double* out, std::size_t n) {
  // masked lanes are rare; scalar tail handles them, vector path assumes none
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    if (mask[i] | mask[i + 1] | mask[i + 2] | mask[i + 3]) break;
    __m256d v = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(mean + i));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(v, _mm256_loadu_pd(inv_sd + i)));
  }
  for (; i < n; ++i) out[i] = mask[i] ? 0.0 : (x[i] - mean[i]) * inv_sd[i];
}

}  // namespace longadapt::kernels::avx2
