// Copyright 2026 The toffoli-mf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// AVX2+FMA kernels. Only the functions carrying TMF_AVX2 are compiled for
// the extended ISA, so this translation unit links into portable builds and
// is only entered after the runtime CPUID check in dispatch.cpp.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <limits>

#include "toffoli_mf/simd.hpp"

#define TMF_AVX2 __attribute__((target("avx2,fma")))

namespace toffoli_mf::simd {
namespace {

TMF_AVX2 void cmatmul8_avx2(const cplx* a, const cplx* b, cplx* c) {
  const double* ad = reinterpret_cast<const double*>(a);
  const double* bd = reinterpret_cast<const double*>(b);
  double* cd = reinterpret_cast<double*>(c);
  for (int j = 0; j < 8; ++j) {
    __m256d r0 = _mm256_setzero_pd(), r1 = r0, r2 = r0, r3 = r0;
    __m256d s0 = r0, s1 = r0, s2 = r0, s3 = r0;
    for (int k = 0; k < 8; ++k) {
      const double* col = ad + 16 * k;
      const __m256d br = _mm256_broadcast_sd(bd + 16 * j + 2 * k);
      const __m256d bi = _mm256_broadcast_sd(bd + 16 * j + 2 * k + 1);
      const __m256d a0 = _mm256_loadu_pd(col);
      const __m256d a1 = _mm256_loadu_pd(col + 4);
      const __m256d a2 = _mm256_loadu_pd(col + 8);
      const __m256d a3 = _mm256_loadu_pd(col + 12);
      r0 = _mm256_fmadd_pd(a0, br, r0);
      r1 = _mm256_fmadd_pd(a1, br, r1);
      r2 = _mm256_fmadd_pd(a2, br, r2);
      r3 = _mm256_fmadd_pd(a3, br, r3);
      s0 = _mm256_fmadd_pd(_mm256_permute_pd(a0, 0b0101), bi, s0);
      s1 = _mm256_fmadd_pd(_mm256_permute_pd(a1, 0b0101), bi, s1);
      s2 = _mm256_fmadd_pd(_mm256_permute_pd(a2, 0b0101), bi, s2);
      s3 = _mm256_fmadd_pd(_mm256_permute_pd(a3, 0b0101), bi, s3);
    }
    double* out = cd + 16 * j;
    _mm256_storeu_pd(out, _mm256_addsub_pd(r0, s0));
    _mm256_storeu_pd(out + 4, _mm256_addsub_pd(r1, s1));
    _mm256_storeu_pd(out + 8, _mm256_addsub_pd(r2, s2));
    _mm256_storeu_pd(out + 12, _mm256_addsub_pd(r3, s3));
  }
}

TMF_AVX2 void cmatmul8_adj_avx2(const cplx* a, const cplx* b, cplx* c) {
  alignas(32) cplx ah[64];
  for (int i = 0; i < 8; ++i)
    for (int k = 0; k < 8; ++k) ah[8 * k + i] = std::conj(a[8 * i + k]);
  cmatmul8_avx2(ah, b, c);
}

TMF_AVX2 void cubic_run_avx2(const double* coef, double t0, std::size_t n, double* out) {
  const __m256d c0 = _mm256_set1_pd(coef[0]);
  const __m256d c1 = _mm256_set1_pd(coef[1]);
  const __m256d c2 = _mm256_set1_pd(coef[2]);
  const __m256d c3 = _mm256_set1_pd(coef[3]);
  const __m256d step = _mm256_set1_pd(4.0);
  __m256d t = _mm256_add_pd(_mm256_set1_pd(t0), _mm256_setr_pd(0.0, 1.0, 2.0, 3.0));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d p = _mm256_fmadd_pd(t, c3, c2);
    p = _mm256_fmadd_pd(t, p, c1);
    p = _mm256_fmadd_pd(t, p, c0);
    _mm256_storeu_pd(out + i, p);
    t = _mm256_add_pd(t, step);
  }
  for (; i < n; ++i) {
    const double s = t0 + static_cast<double>(i);
    out[i] = coef[0] + s * (coef[1] + s * (coef[2] + s * coef[3]));
  }
}

// exp on four lanes: range reduction by ln 2 and a degree-12 Taylor
// polynomial on |r| <= ln(2)/2 (truncation error below 2e-16 relative).
// Inputs below -708 flush to zero.
TMF_AVX2 inline __m256d exp4(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d under = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);
  static constexpr double inv_fact[13] = {
      1.0,
      1.0,
      1.0 / 2.0,
      1.0 / 6.0,
      1.0 / 24.0,
      1.0 / 120.0,
      1.0 / 720.0,
      1.0 / 5040.0,
      1.0 / 40320.0,
      1.0 / 362880.0,
      1.0 / 3628800.0,
      1.0 / 39916800.0,
      1.0 / 479001600.0,
  };
  __m256d p = _mm256_set1_pd(inv_fact[12]);
  for (int k = 11; k >= 0; --k) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(inv_fact[k]));
  const __m128i ni = _mm256_cvtpd_epi32(n);
  __m256i bits = _mm256_cvtepi32_epi64(ni);
  bits = _mm256_slli_epi64(_mm256_add_epi64(bits, _mm256_set1_epi64x(1023)), 52);
  const __m256d scale = _mm256_castsi256_pd(bits);
  return _mm256_andnot_pd(under, _mm256_mul_pd(p, scale));
}

TMF_AVX2 double sum_exp_affine_avx2(const double* x, std::size_t n, double scale, double shift) {
  const __m256d vs = _mm256_set1_pd(scale);
  const __m256d vb = _mm256_set1_pd(shift);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, exp4(_mm256_fmadd_pd(_mm256_loadu_pd(x + i), vs, vb)));
    acc1 = _mm256_add_pd(acc1, exp4(_mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), vs, vb)));
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_add_pd(acc0, exp4(_mm256_fmadd_pd(_mm256_loadu_pd(x + i), vs, vb)));
  if (i < n) {
    alignas(32) double tail[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t rem = n - i;
    for (std::size_t k = 0; k < rem; ++k) tail[k] = x[i + k];
    const __m256i lane = _mm256_setr_epi64x(0, 1, 2, 3);
    const __m256d keep = _mm256_castsi256_pd(
        _mm256_cmpgt_epi64(_mm256_set1_epi64x(static_cast<long long>(rem)), lane));
    const __m256d e = exp4(_mm256_fmadd_pd(_mm256_load_pd(tail), vs, vb));
    acc1 = _mm256_add_pd(acc1, _mm256_and_pd(e, keep));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

TMF_AVX2 void hermite_abs_avx2(const double* re, const double* im, const double* dre,
                               const double* dim, std::size_t m, double x0, double h,
                               const double* x, std::size_t n, double* out) {
  const double last = static_cast<double>(m - 1);
  const __m256d vx0 = _mm256_set1_pd(x0);
  const __m256d vh = _mm256_set1_pd(h);
  const __m256d vlast = _mm256_set1_pd(last);
  const __m256d vmaxj = _mm256_set1_pd(static_cast<double>(m - 2));
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d three = _mm256_set1_pd(3.0);
  const __m256d nan = _mm256_set1_pd(std::numeric_limits<double>::quiet_NaN());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d u = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), vx0), vh);
    const __m256d valid = _mm256_and_pd(_mm256_cmp_pd(u, zero, _CMP_GE_OQ),
                                        _mm256_cmp_pd(u, vlast, _CMP_LE_OQ));
    const __m256d us = _mm256_blendv_pd(zero, u, valid);
    const __m256d jf = _mm256_min_pd(_mm256_floor_pd(us), vmaxj);
    const __m128i j = _mm256_cvttpd_epi32(jf);
    const __m128i j1 = _mm_add_epi32(j, _mm_set1_epi32(1));
    const __m256d t = _mm256_sub_pd(us, jf);
    const __m256d t2 = _mm256_mul_pd(t, t);
    const __m256d t3 = _mm256_mul_pd(t2, t);
    const __m256d h01 = _mm256_fmadd_pd(three, t2, _mm256_mul_pd(_mm256_set1_pd(-2.0), t3));
    const __m256d h00 = _mm256_sub_pd(one, h01);
    const __m256d h10 = _mm256_mul_pd(_mm256_add_pd(_mm256_fnmadd_pd(two, t2, t3), t), vh);
    const __m256d h11 = _mm256_mul_pd(_mm256_sub_pd(t3, t2), vh);
    const __m256d wr = _mm256_fmadd_pd(
        h00, _mm256_i32gather_pd(re, j, 8),
        _mm256_fmadd_pd(h10, _mm256_i32gather_pd(dre, j, 8),
                        _mm256_fmadd_pd(h01, _mm256_i32gather_pd(re, j1, 8),
                                        _mm256_mul_pd(h11, _mm256_i32gather_pd(dre, j1, 8)))));
    const __m256d wi = _mm256_fmadd_pd(
        h00, _mm256_i32gather_pd(im, j, 8),
        _mm256_fmadd_pd(h10, _mm256_i32gather_pd(dim, j, 8),
                        _mm256_fmadd_pd(h01, _mm256_i32gather_pd(im, j1, 8),
                                        _mm256_mul_pd(h11, _mm256_i32gather_pd(dim, j1, 8)))));
    const __m256d mag = _mm256_sqrt_pd(_mm256_fmadd_pd(wr, wr, _mm256_mul_pd(wi, wi)));
    _mm256_storeu_pd(out + i, _mm256_blendv_pd(nan, mag, valid));
  }
  if (i < n) detail::scalar_table().hermite_abs(re, im, dre, dim, m, x0, h, x + i, n - i, out + i);
}

}  // namespace

namespace detail {
const KernelTable& avx2_table() {
  static const KernelTable table{cmatmul8_avx2, cmatmul8_adj_avx2, cubic_run_avx2,
                                 sum_exp_affine_avx2, hermite_abs_avx2};
  return table;
}
}  // namespace detail

}  // namespace toffoli_mf::simd

#endif
