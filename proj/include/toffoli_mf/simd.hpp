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

#pragma once

// Data-parallel inner loops used by the numerical modules.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2+FMA variant compiled with function-level target attributes. The
// variant is chosen once at startup from CPUID; setting the environment
// variable TOFFOLI_MF_SIMD=scalar forces the reference path. The two paths
// are equivalence-tested in tests/unit/test_simd.cpp.

#include <complex>
#include <cstddef>
#include <string_view>

namespace toffoli_mf::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  // c = a * b for 8x8 column-major complex matrices. c must not alias a or b.
  void (*cmatmul8)(const cplx* a, const cplx* b, cplx* c);

  // c = a^H * b for 8x8 column-major complex matrices. c must not alias.
  void (*cmatmul8_adj)(const cplx* a, const cplx* b, cplx* c);

  // out[i] = c0 + c1*t + c2*t^2 + c3*t^3 with t = t0 + i, for i in [0, n).
  void (*cubic_run)(const double* coef, double t0, std::size_t n, double* out);

  // Returns sum_i exp(scale * x[i] + shift). Arguments below -745 underflow
  // to zero; callers keep the largest argument at or near zero.
  double (*sum_exp_affine)(const double* x, std::size_t n, double scale, double shift);

  // Cubic Hermite evaluation of |w(x)| where w is complex and tabulated on the
  // uniform grid x0 + j*h, j in [0, m), with values (re, im) and derivatives
  // (dre, dim). Samples outside [x0, x0 + (m-1)h] yield NaN.
  void (*hermite_abs)(const double* re, const double* im, const double* dre,
                      const double* dim, std::size_t m, double x0, double h,
                      const double* x, std::size_t n, double* out);
};

// Active table, selected on first use.
const KernelTable& kernels();
Isa active_isa();

// Table for a specific ISA; throws std::runtime_error when the CPU lacks it.
const KernelTable& kernels_for(Isa isa);
bool cpu_supports(Isa isa);

namespace detail {
const KernelTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
#endif
}  // namespace detail

}  // namespace toffoli_mf::simd
