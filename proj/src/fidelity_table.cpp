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


#include "toffoli_mf/fidelity_table.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "toffoli_mf/parallel.hpp"
#include "toffoli_mf/simd.hpp"

namespace toffoli_mf {

FidelityTable::FidelityTable(const quantum::PulseSet& pulses, const quantum::CouplingConfig& cfg,
                             const FidelityTableOptions& options)
    : pulses_(pulses), cfg_(cfg) {
  if (options.points < 2 || !(options.hi > options.lo))
    throw std::invalid_argument("fidelity table needs >= 2 points on a non-empty range");
  const std::size_t m = options.points;
  x0_ = options.lo * cfg.jbar;
  h_ = (options.hi - options.lo) * cfg.jbar / static_cast<double>(m - 1);
  re_.resize(m);
  im_.resize(m);
  dre_.resize(m);
  dim_.resize(m);
  const auto& target = quantum::toffoli_target();
  parallel_for(m, options.threads, [&](std::size_t i) {
    const double j = x0_ + h_ * static_cast<double>(i);
    const auto d = quantum::overlap_derivatives(pulses_, cfg_, j, target, false, true);
    re_[i] = d.overlap.real();
    im_[i] = d.overlap.imag();
    dre_[i] = d.d_j.real();
    dim_[i] = d.d_j.imag();
  });

  if (options.probes == 0) return;
  std::mt19937_64 rng(options.probe_seed);
  std::uniform_real_distribution<double> cell(0.0, static_cast<double>(m - 1));
  std::vector<double> probe(options.probes);
  for (auto& x : probe) {
    // Keep probes strictly off the grid.
    double u = cell(rng);
    if (u - std::floor(u) < 1e-3) u += 0.5;
    x = x0_ + h_ * std::min(u, static_cast<double>(m - 1) - 0.5);
  }
  std::vector<double> interp(probe.size()), error(probe.size());
  evaluate(probe, interp);
  parallel_for(probe.size(), options.threads,
               [&](std::size_t i) { error[i] = std::abs(interp[i] - exact(probe[i])); });
  certified_error_ = *std::max_element(error.begin(), error.end());
}

double FidelityTable::exact(double j) const {
  return std::min(1.0, std::abs(quantum::overlap(pulses_, cfg_, j, quantum::toffoli_target())));
}

void FidelityTable::evaluate(std::span<const double> j, std::span<double> out) const {
  if (out.size() != j.size()) throw std::invalid_argument("output size mismatch");
  simd::kernels().hermite_abs(re_.data(), im_.data(), dre_.data(), dim_.data(), re_.size(), x0_,
                              h_, j.data(), j.size(), out.data());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (std::isnan(out[i])) out[i] = exact(j[i]);
    else out[i] = std::min(1.0, out[i]);
  }
}

double FidelityTable::operator()(double j) const {
  double out = 0.0;
  evaluate(std::span<const double>(&j, 1), std::span<double>(&out, 1));
  return out;
}

std::vector<double> fidelity_series(const quantum::PulseSet& pulses,
                                    const quantum::CouplingConfig& cfg, std::span<const double> j,
                                    EvalMode mode, unsigned threads) {
  std::vector<double> out(j.size());
  if (mode == EvalMode::interpolated) {
    FidelityTableOptions opt;
    opt.threads = threads;
    FidelityTable(pulses, cfg, opt).evaluate(j, out);
    return out;
  }
  const auto& target = quantum::toffoli_target();
  parallel_for(j.size(), threads, [&](std::size_t i) {
    out[i] = std::min(1.0, std::abs(quantum::overlap(pulses, cfg, j[i], target)));
  });
  return out;
}

}  // namespace toffoli_mf
