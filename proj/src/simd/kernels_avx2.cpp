// Compiled with -mavx2 (and deliberately without -mfma).

#include <immintrin.h>

#include "bandspectra/simd/kernels.hpp"

namespace bandspectra::simd::detail {

namespace {

void mul_add_avx2(double* acc, const double* x, const double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), prod));
  }
  for (; i < n; ++i) acc[i] += x[i] * y[i];
}

void mul_add_compensated_avx2(double* acc, double* comp, const double* x, const double* y, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(acc + i);
    const __m256d c = _mm256_loadu_pd(comp + i);
    const __m256d term = _mm256_sub_pd(_mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)), c);
    const __m256d sum = _mm256_add_pd(a, term);
    _mm256_storeu_pd(comp + i, _mm256_sub_pd(_mm256_sub_pd(sum, a), term));
    _mm256_storeu_pd(acc + i, sum);
  }
  for (; i < n; ++i) {
    const double term = x[i] * y[i] - comp[i];
    const double sum = acc[i] + term;
    comp[i] = (sum - acc[i]) - term;
    acc[i] = sum;
  }
}

void axpy_avx2(double* acc, double a, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
  }
  for (; i < n; ++i) acc[i] += a * x[i];
}

void rotate_avx2(double* x, double* y, double c, double s, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d yi = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(x + i, _mm256_sub_pd(_mm256_mul_pd(vc, xi), _mm256_mul_pd(vs, yi)));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_mul_pd(vs, xi), _mm256_mul_pd(vc, yi)));
  }
  for (; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

constexpr KernelTable kAvx2{Isa::Avx2, mul_add_avx2, mul_add_compensated_avx2, axpy_avx2, rotate_avx2};

}  // namespace

const KernelTable* avx2_table() noexcept { return &kAvx2; }

}  // namespace bandspectra::simd::detail
