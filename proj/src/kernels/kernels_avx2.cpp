// Compiled with -mavx2 -mfma. Only reached through the dispatch table after a CPUID check.

#include <immintrin.h>

#include <cmath>

#include "eigentraj/kernels.hpp"

namespace eigentraj::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void gram(const double* a, std::size_t rows, std::size_t cols, double* out) {
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = i; j < rows; ++j) {
      const double v = dot(a + i * cols, a + j * cols, cols);
      out[i * rows + j] = v;
      out[j * rows + i] = v;
    }
  }
}

double squared_distance(const double* p, const double* c, std::size_t dim) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t d = 0;
  for (; d + 4 <= dim; d += 4) {
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(p + d), _mm256_loadu_pd(c + d));
    acc = _mm256_fmadd_pd(diff, diff, acc);
  }
  double sum = hsum(acc);
  for (; d < dim; ++d) {
    const double diff = p[d] - c[d];
    sum += diff * diff;
  }
  return sum;
}

void squared_distances(const double* points, std::size_t n, const double* centers, std::size_t m,
                       std::size_t dim, double* out) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] = squared_distance(points + i * dim, centers + j * dim, dim);
}

void point_distances(const double* a, const double* b, std::size_t npoints, double* out) {
  std::size_t t = 0;
  // Four points (eight doubles) per iteration: square, pair-sum x/y with hadd, sqrt.
  for (; t + 4 <= npoints; t += 4) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + 2 * t), _mm256_loadu_pd(b + 2 * t));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + 2 * t + 4), _mm256_loadu_pd(b + 2 * t + 4));
    // hadd yields (p0, p2, p1, p3); permute back to (p0, p1, p2, p3).
    const __m256d sums = _mm256_hadd_pd(_mm256_mul_pd(d0, d0), _mm256_mul_pd(d1, d1));
    const __m256d ordered = _mm256_permute4x64_pd(sums, _MM_SHUFFLE(3, 1, 2, 0));
    _mm256_storeu_pd(out + t, _mm256_sqrt_pd(ordered));
  }
  for (; t < npoints; ++t) {
    const double dx = a[2 * t] - b[2 * t];
    const double dy = a[2 * t + 1] - b[2 * t + 1];
    out[t] = std::sqrt(dx * dx + dy * dy);
  }
}

}  // namespace

const KernelTable table{Isa::avx2, &dot, &gram, &squared_distances, &point_distances};

}  // namespace eigentraj::kernels::avx2
