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

#include <cmath>
#include <limits>

#include "toffoli_mf/simd.hpp"

namespace toffoli_mf::simd {
namespace {

void cmatmul8_scalar(const cplx* a, const cplx* b, cplx* c) {
  for (int j = 0; j < 8; ++j) {
    double acc_re[8] = {};
    double acc_im[8] = {};
    for (int k = 0; k < 8; ++k) {
      const double br = b[8 * j + k].real();
      const double bi = b[8 * j + k].imag();
      const cplx* col = a + 8 * k;
      for (int i = 0; i < 8; ++i) {
        acc_re[i] += col[i].real() * br - col[i].imag() * bi;
        acc_im[i] += col[i].imag() * br + col[i].real() * bi;
      }
    }
    for (int i = 0; i < 8; ++i) c[8 * j + i] = cplx(acc_re[i], acc_im[i]);
  }
}

void cmatmul8_adj_scalar(const cplx* a, const cplx* b, cplx* c) {
  // (a^H b)(i, j) = sum_k conj(a(k, i)) b(k, j): dot products of columns.
  for (int j = 0; j < 8; ++j) {
    const cplx* bj = b + 8 * j;
    for (int i = 0; i < 8; ++i) {
      const cplx* ai = a + 8 * i;
      double re = 0.0;
      double im = 0.0;
      for (int k = 0; k < 8; ++k) {
        re += ai[k].real() * bj[k].real() + ai[k].imag() * bj[k].imag();
        im += ai[k].real() * bj[k].imag() - ai[k].imag() * bj[k].real();
      }
      c[8 * j + i] = cplx(re, im);
    }
  }
}

void cubic_run_scalar(const double* coef, double t0, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i);
    out[i] = coef[0] + t * (coef[1] + t * (coef[2] + t * coef[3]));
  }
}

double sum_exp_affine_scalar(const double* x, std::size_t n, double scale, double shift) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(scale * x[i] + shift);
  return s;
}

void hermite_abs_scalar(const double* re, const double* im, const double* dre,
                        const double* dim, std::size_t m, double x0, double h,
                        const double* x, std::size_t n, double* out) {
  const double last = static_cast<double>(m - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (x[i] - x0) / h;
    if (!(u >= 0.0 && u <= last)) {
      out[i] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    std::size_t j = static_cast<std::size_t>(u);
    if (j >= m - 1) j = m - 2;
    const double t = u - static_cast<double>(j);
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = (t3 - 2.0 * t2 + t) * h;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = (t3 - t2) * h;
    const double wr = h00 * re[j] + h10 * dre[j] + h01 * re[j + 1] + h11 * dre[j + 1];
    const double wi = h00 * im[j] + h10 * dim[j] + h01 * im[j + 1] + h11 * dim[j + 1];
    out[i] = std::sqrt(wr * wr + wi * wi);
  }
}

}  // namespace

namespace detail {
const KernelTable& scalar_table() {
  static const KernelTable table{cmatmul8_scalar, cmatmul8_adj_scalar, cubic_run_scalar,
                                 sum_exp_affine_scalar, hermite_abs_scalar};
  return table;
}
}  // namespace detail

}  // namespace toffoli_mf::simd
