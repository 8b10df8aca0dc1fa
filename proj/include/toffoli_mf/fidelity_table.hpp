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

// Fidelity as a function of the scalar coupling J for a fixed pulse set.
//
// The complex overlap w(J) = Tr(T^H U(J)) / 8 is smooth in J, so it is
// tabulated together with its exact derivative dw/dJ on a uniform grid and
// evaluated by cubic Hermite interpolation; F = |w|. Construction certifies
// the table against exact propagation at random off-grid probes.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "toffoli_mf/quantum.hpp"

namespace toffoli_mf {

struct FidelityTableOptions {
  double lo = -0.5;  // J / jbar
  double hi = 2.5;
  std::size_t points = 4001;
  std::size_t probes = 1000;
  std::uint64_t probe_seed = 7;
  unsigned threads = 0;
};

class FidelityTable {
 public:
  FidelityTable(const quantum::PulseSet& pulses, const quantum::CouplingConfig& cfg,
                const FidelityTableOptions& options = {});

  // Interpolated fidelity; samples outside the table are evaluated exactly.
  void evaluate(std::span<const double> j, std::span<double> out) const;
  double operator()(double j) const;
  double exact(double j) const;

  // Max |interpolated - exact| over the certification probes.
  double certified_error() const { return certified_error_; }
  double j_min() const { return x0_; }
  double j_max() const { return x0_ + h_ * static_cast<double>(re_.size() - 1); }

 private:
  quantum::PulseSet pulses_;
  quantum::CouplingConfig cfg_;
  double x0_ = 0.0;
  double h_ = 0.0;
  std::vector<double> re_, im_, dre_, dim_;
  double certified_error_ = 0.0;
};

enum class EvalMode { exact, interpolated };

// Elementwise F(J(t)). Interpolated mode builds a table for the call; reuse a
// FidelityTable directly when evaluating many series with one pulse set.
std::vector<double> fidelity_series(const quantum::PulseSet& pulses,
                                    const quantum::CouplingConfig& cfg, std::span<const double> j,
                                    EvalMode mode, unsigned threads = 0);

}  // namespace toffoli_mf
