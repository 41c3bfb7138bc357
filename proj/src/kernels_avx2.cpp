// Built with -mavx2 -mfma; only reached through the runtime dispatcher.

#include "tonekit/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace tonekit::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i)
    s += a[i] * b[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i)
    y[i] += alpha * x[i];
}

void xpby_avx2(const double* x, double beta, double* y, std::size_t n) {
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vb, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
  for (; i < n; ++i)
    y[i] = x[i] + beta * y[i];
}

void spmv_avx2(std::size_t n, const int* row_ptr, const int* cols, const double* vals,
               const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) {
    const int begin = row_ptr[i];
    const int end = row_ptr[i + 1];
    __m256d acc = _mm256_setzero_pd();
    int k = begin;
    for (; k + 4 <= end; k += 4) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + k));
      const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + k), xv, acc);
    }
    double s = hsum(acc);
    for (; k < end; ++k)
      s += vals[k] * x[cols[k]];
    y[i] = s;
  }
}

inline __m256d inverse_power(__m256d r2, double lambda) {
  const __m256d one = _mm256_set1_pd(1.0);
  if (lambda == 1.0)
    return _mm256_div_pd(one, _mm256_sqrt_pd(r2));
  if (lambda == 2.0)
    return _mm256_div_pd(one, r2);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, r2);
  for (double& l : lanes)
    l = std::pow(l, -0.5 * lambda);
  return _mm256_load_pd(lanes);
}

double riesz_avx2(const double* t, const SourceSet& s, double lambda, double cutoff) {
  const std::size_t n = s.size();
  const __m256d tx = _mm256_set1_pd(t[0]);
  const __m256d ty = _mm256_set1_pd(t[1]);
  const __m256d tz = _mm256_set1_pd(t[2]);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const bool use_cut = cutoff > 0.0;
  const __m256d cut2 = _mm256_set1_pd(cutoff * cutoff);
  const __m256d inv_cut = _mm256_set1_pd(use_cut ? 1.0 / cutoff : 0.0);
  const __m256d c35 = _mm256_set1_pd(35.0), c84 = _mm256_set1_pd(-84.0);
  const __m256d c70 = _mm256_set1_pd(70.0), c20 = _mm256_set1_pd(-20.0);

  __m256d acc = zero;
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dx = _mm256_sub_pd(tx, _mm256_loadu_pd(s.x.data() + j));
    const __m256d dy = _mm256_sub_pd(ty, _mm256_loadu_pd(s.y.data() + j));
    const __m256d dz = _mm256_sub_pd(tz, _mm256_loadu_pd(s.z.data() + j));
    __m256d r2 = _mm256_mul_pd(dx, dx);
    r2 = _mm256_fmadd_pd(dy, dy, r2);
    r2 = _mm256_fmadd_pd(dz, dz, r2);
    const __m256d nonzero = _mm256_cmp_pd(r2, zero, _CMP_NEQ_OQ);
    // Replace coincident points by 1 so the power stays finite; masked below.
    const __m256d r2safe = _mm256_blendv_pd(one, r2, nonzero);
    __m256d term = _mm256_mul_pd(_mm256_loadu_pd(s.w.data() + j), inverse_power(r2safe, lambda));
    if (use_cut) {
      const __m256d inside = _mm256_cmp_pd(r2, cut2, _CMP_LT_OQ);
      if (_mm256_movemask_pd(inside) != 0) {
        const __m256d tt = _mm256_mul_pd(_mm256_sqrt_pd(r2), inv_cut);
        const __m256d t2 = _mm256_mul_pd(tt, tt);
        const __m256d t4 = _mm256_mul_pd(t2, t2);
        __m256d p = _mm256_fmadd_pd(c20, tt, c70);
        p = _mm256_fmadd_pd(p, tt, c84);
        p = _mm256_fmadd_pd(p, tt, c35);
        const __m256d step = _mm256_mul_pd(t4, p);
        term = _mm256_mul_pd(term, _mm256_blendv_pd(one, step, inside));
      }
    }
    acc = _mm256_add_pd(acc, _mm256_and_pd(term, nonzero));
  }
  double sum = hsum(acc);
  if (j < n) {
    SourceSet tail;
    for (; j < n; ++j)
      tail.push(s.x[j], s.y[j], s.z[j], s.w[j]);
    sum += scalar_table().riesz_sum(t, tail, lambda, cutoff);
  }
  return sum;
}

} // namespace

const Table& avx2_table() {
  static const Table table{dot_avx2, axpy_avx2, xpby_avx2, spmv_avx2, riesz_avx2};
  return table;
}

} // namespace tonekit::kernels::detail
