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

#include "toffoli_mf/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "toffoli_mf/simd.hpp"

namespace toffoli_mf {

CubicSpline::CubicSpline(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("spline needs >= 2 knots and matching values");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x[i] > x[i - 1])) throw std::invalid_argument("spline knots must be strictly increasing");

  // Second derivatives m_i from the tridiagonal system, m_0 = m_{n-1} = 0.
  std::vector<double> m(n, 0.0);
  if (n > 2) {
    std::vector<double> c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x[i] - x[i - 1];
      const double h1 = x[i + 1] - x[i];
      const double a = h0;
      const double b = 2.0 * (h0 + h1);
      const double cc = h1;
      const double r = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
      const double denom = b - a * c[i - 1];
      c[i] = cc / denom;
      d[i] = (r - a * d[i - 1]) / denom;
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m[i] = d[i] - c[i] * m[i + 1];
      if (i == 1) break;
    }
  }
  coef_.resize(4 * (n - 1));
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double h = x[j + 1] - x[j];
    coef_[4 * j + 0] = y[j];
    coef_[4 * j + 1] = (y[j + 1] - y[j]) / h - h * (2.0 * m[j] + m[j + 1]) / 6.0;
    coef_[4 * j + 2] = m[j] / 2.0;
    coef_[4 * j + 3] = (m[j + 1] - m[j]) / (6.0 * h);
  }
}

std::size_t CubicSpline::interval(double t) const {
  if (t <= x_.front()) return 0;
  if (t >= x_.back()) return x_.size() - 2;
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double CubicSpline::operator()(double t) const {
  const std::size_t j = interval(t);
  const double s = t - x_[j];
  const double* c = &coef_[4 * j];
  return c[0] + s * (c[1] + s * (c[2] + s * c[3]));
}

void CubicSpline::evaluate_grid(std::span<double> out) const {
  const auto run = simd::kernels().cubic_run;
  const std::size_t n = out.size();
  const std::size_t intervals = x_.size() - 1;
  std::size_t t = 0;
  for (std::size_t j = 0; j < intervals && t < n; ++j) {
    // Samples owned by interval j: t < x_{j+1}, the last interval takes the rest.
    std::size_t end = n;
    if (j + 1 < intervals) {
      const double upper = std::ceil(x_[j + 1]);
      end = upper <= 0.0 ? 0 : std::min(n, static_cast<std::size_t>(upper));
    }
    if (end <= t) continue;
    run(&coef_[4 * j], static_cast<double>(t) - x_[j], end - t, out.data() + t);
    t = end;
  }
}

}  // namespace toffoli_mf
