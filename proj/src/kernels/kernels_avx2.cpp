// AVX2 variants of the data-parallel kernels. This translation unit is
// compiled with -mavx2 on x86-64; dispatch.cpp only hands these out when
// the running CPU reports AVX2.

#include "vri/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include <cmath>

namespace vri::kernels {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  }
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i];
  return r;
}

double sum_sq_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i] * x[i];
  return r;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(
        acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

void scale_avx2(double* x, std::size_t n, double s) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), vs));
  }
  for (; i < n; ++i) x[i] *= s;
}

void abs_div_avx2(const double* x, const double* d, double* out,
                  std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_andnot_pd(sign_mask, _mm256_loadu_pd(x + i));
    const __m256d vd = _mm256_loadu_pd(d + i);
    const __m256d q = _mm256_div_pd(vx, vd);
    const __m256d pos = _mm256_cmp_pd(vd, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(out + i, _mm256_and_pd(q, pos));
  }
  for (; i < n; ++i) {
    out[i] = d[i] > 0.0 ? std::fabs(x[i]) / d[i] : 0.0;
  }
}

std::size_t count_ge_avx2(const double* x, std::size_t n, double q) {
  const __m256d vq = _mm256_set1_pd(q);
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ge = _mm256_cmp_pd(_mm256_loadu_pd(x + i), vq, _CMP_GE_OQ);
    c += static_cast<std::size_t>(
        _mm_popcnt_u32(static_cast<unsigned>(_mm256_movemask_pd(ge))));
  }
  for (; i < n; ++i) {
    if (x[i] >= q) ++c;
  }
  return c;
}

std::size_t collect_ge_avx2(const double* x, std::size_t n, double q,
                            std::size_t base, std::size_t* out) {
  const __m256d vq = _mm256_set1_pd(q);
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ge = _mm256_cmp_pd(_mm256_loadu_pd(x + i), vq, _CMP_GE_OQ);
    unsigned mask = static_cast<unsigned>(_mm256_movemask_pd(ge));
    while (mask != 0) {
      const unsigned lane = static_cast<unsigned>(__builtin_ctz(mask));
      out[c++] = base + i + lane;
      mask &= mask - 1;
    }
  }
  for (; i < n; ++i) {
    if (x[i] >= q) out[c++] = base + i;
  }
  return c;
}

double detrend_sq_avx2(const double* y, const double* b0, const double* b1,
                       const double* b2, double c0, double c1, double c2,
                       std::size_t n) {
  const __m256d v0 = _mm256_set1_pd(c0);
  const __m256d v1 = _mm256_set1_pd(c1);
  const __m256d v2 = _mm256_set1_pd(c2);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  if (b2 != nullptr) {
    for (; i + 4 <= n; i += 4) {
      __m256d r = _mm256_loadu_pd(y + i);
      r = _mm256_sub_pd(r, _mm256_mul_pd(v0, _mm256_loadu_pd(b0 + i)));
      r = _mm256_sub_pd(r, _mm256_mul_pd(v1, _mm256_loadu_pd(b1 + i)));
      r = _mm256_sub_pd(r, _mm256_mul_pd(v2, _mm256_loadu_pd(b2 + i)));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(r, r));
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
      const double r = y[i] - c0 * b0[i] - c1 * b1[i] - c2 * b2[i];
      s += r * r;
    }
    return s;
  }
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_loadu_pd(y + i);
    r = _mm256_sub_pd(r, _mm256_mul_pd(v0, _mm256_loadu_pd(b0 + i)));
    r = _mm256_sub_pd(r, _mm256_mul_pd(v1, _mm256_loadu_pd(b1 + i)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(r, r));
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double r = y[i] - c0 * b0[i] - c1 * b1[i];
    s += r * r;
  }
  return s;
}

}  // namespace

const Backend* avx2_backend_impl() {
  static const Backend backend{
      "avx2",        sum_avx2,      sum_sq_avx2,
      dot_avx2,      scale_avx2,    abs_div_avx2,
      count_ge_avx2, collect_ge_avx2, detrend_sq_avx2,
  };
  return &backend;
}

}  // namespace vri::kernels

#else

namespace vri::kernels {
const Backend* avx2_backend_impl() { return nullptr; }
}  // namespace vri::kernels

#endif
