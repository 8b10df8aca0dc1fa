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

#include <span>
#include <vector>

namespace toffoli_mf {

// Natural cubic spline through (x_j, y_j) with strictly increasing x.
// Two knots degrade to the straight line. Outside the knot range the end
// polynomials are extended.
class CubicSpline {
 public:
  CubicSpline(std::span<const double> x, std::span<const double> y);

  double operator()(double t) const;

  // Evaluates at t = 0, 1, ..., out.size() - 1.
  void evaluate_grid(std::span<double> out) const;

  std::size_t knots() const { return x_.size(); }

 private:
  std::size_t interval(double t) const;

  std::vector<double> x_;
  // Per interval j: y(t) = c0 + c1 s + c2 s^2 + c3 s^3 with s = t - x_j.
  std::vector<double> coef_;
};

}  // namespace toffoli_mf
