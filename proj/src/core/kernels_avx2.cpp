#include "panosr/core/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define PANOSR_X86 1
#include <immintrin.h>
#else
#define PANOSR_X86 0
#endif

#include <algorithm>

// AVX2 variants, 4 doubles per vector. Elementwise kernels use explicit
// mul+add (no FMA) so they match the scalar reference bit for bit.
// Reductions keep 4 lane accumulators and fold at the end; equivalence
// against scalar is to tolerance, not bitwise.

namespace panosr::kern::avx2 {

#if PANOSR_X86

bool supported() { return __builtin_cpu_supports("avx2") != 0; }

void axpy(double* y, const double* x, double a, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d xv = _mm256_loadu_pd(x + i);
    __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(yv, _mm256_mul_pd(av, xv)));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void axpby(double* y, const double* x, double a, double b, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  const __m256d bv = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d xv = _mm256_loadu_pd(x + i);
    __m256d yv = _mm256_loadu_pd(y + i);
    __m256d r = _mm256_add_pd(_mm256_mul_pd(av, xv), _mm256_mul_pd(bv, yv));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void wsum4(double* out, const double* r0, const double* r1, const double* r2,
           const double* r3, double w0, double w1, double w2, double w3,
           std::size_t n) {
  const __m256d w0v = _mm256_set1_pd(w0);
  const __m256d w1v = _mm256_set1_pd(w1);
  const __m256d w2v = _mm256_set1_pd(w2);
  const __m256d w3v = _mm256_set1_pd(w3);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d s01 = _mm256_add_pd(_mm256_mul_pd(w0v, _mm256_loadu_pd(r0 + i)),
                                _mm256_mul_pd(w1v, _mm256_loadu_pd(r1 + i)));
    __m256d s23 = _mm256_add_pd(_mm256_mul_pd(w2v, _mm256_loadu_pd(r2 + i)),
                                _mm256_mul_pd(w3v, _mm256_loadu_pd(r3 + i)));
    _mm256_storeu_pd(out + i, _mm256_add_pd(s01, s23));
  }
  for (; i < n; ++i) {
    out[i] = ((w0 * r0[i] + w1 * r1[i]) + (w2 * r2[i] + w3 * r3[i]));
  }
}

void add(double* out, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(
        out + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub(double* out, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(
        out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul(double* out, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(
        out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void scale(double* x, double a, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] = a * x[i];
}

void clamp01(double* x, std::size_t n) {
  const __m256d lo = _mm256_setzero_pd();
  const __m256d hi = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(x + i, _mm256_min_pd(hi, _mm256_max_pd(lo, v)));
  }
  for (; i < n; ++i) x[i] = std::clamp(x[i], 0.0, 1.0);
}

namespace {
inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}
}  // namespace

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i];
  return r;
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(
        acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double r = hsum(acc);
  for (; i < n; ++i) r += a[i] * b[i];
  return r;
}

double sqdiff_sum(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double r = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    r += d * d;
  }
  return r;
}

#else  // !PANOSR_X86

bool supported() { return false; }

void axpy(double* y, const double* x, double a, std::size_t n) {
  scalar::axpy(y, x, a, n);
}
void axpby(double* y, const double* x, double a, double b, std::size_t n) {
  scalar::axpby(y, x, a, b, n);
}
void wsum4(double* out, const double* r0, const double* r1, const double* r2,
           const double* r3, double w0, double w1, double w2, double w3,
           std::size_t n) {
  scalar::wsum4(out, r0, r1, r2, r3, w0, w1, w2, w3, n);
}
void add(double* out, const double* a, const double* b, std::size_t n) {
  scalar::add(out, a, b, n);
}
void sub(double* out, const double* a, const double* b, std::size_t n) {
  scalar::sub(out, a, b, n);
}
void mul(double* out, const double* a, const double* b, std::size_t n) {
  scalar::mul(out, a, b, n);
}
void scale(double* x, double a, std::size_t n) { scalar::scale(x, a, n); }
void clamp01(double* x, std::size_t n) { scalar::clamp01(x, n); }
double sum(const double* x, std::size_t n) { return scalar::sum(x, n); }
double dot(const double* a, const double* b, std::size_t n) {
  return scalar::dot(a, b, n);
}
double sqdiff_sum(const double* a, const double* b, std::size_t n) {
  return scalar::sqdiff_sum(a, b, n);
}

#endif

}  // namespace panosr::kern::avx2
