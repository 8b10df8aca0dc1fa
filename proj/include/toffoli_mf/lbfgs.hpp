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

// Limited-memory BFGS ascent with a weak-Wolfe bracketing line search.
// The bisection line search also behaves on piecewise-smooth objectives,
// where strong-Wolfe interpolation schemes tend to stall at kinks.

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace toffoli_mf::opt {

// Writes the gradient into `grad` and returns the objective value.
using ValueAndGradient = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct LbfgsOptions {
  int memory = 10;
  int max_iterations = 2000;
  double gradient_tolerance = 1e-6;  // infinity norm
  int max_line_search = 50;
  double armijo = 1e-4;
  double wolfe = 0.9;
  // Stop after this many consecutive accepted steps that improve the
  // objective by less than stall_tolerance * max(1, |f|).
  int stall_iterations = 20;
  double stall_tolerance = 1e-15;
};

enum class LbfgsStatus { converged, max_iterations, line_search_failed, stalled };

std::string_view status_name(LbfgsStatus status);

struct LbfgsResult {
  std::vector<double> x;
  std::vector<double> gradient;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  LbfgsStatus status = LbfgsStatus::max_iterations;
  std::vector<double> history;  // objective after each accepted step

  bool converged() const { return status == LbfgsStatus::converged; }
};

LbfgsResult maximize(const ValueAndGradient& fg, std::vector<double> x0,
                     const LbfgsOptions& options = {});

}  // namespace toffoli_mf::opt
