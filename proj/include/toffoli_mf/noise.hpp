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

// Gaussian noise sequences for the coupling model J(t) = jbar (1 + eps(t)),
// one sample per gate realization.
//
// Every generated sequence is affinely renormalized so that its sample mean
// is exactly 0 and its root-mean-square deviation (1/n normalization) is
// exactly sigma.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "toffoli_mf/series_io.hpp"

namespace toffoli_mf::noise {

enum class NoiseKind { pink, white };

std::string_view kind_name(NoiseKind kind);
NoiseKind parse_kind(std::string_view name);

// 1/f noise by spectral synthesis: complex Gaussian bins scaled by f^(-1/2),
// zero DC, Hermitian-symmetric, inverse FFT. n must be a power of two.
SeriesR pink_noise(std::size_t n, double sigma, std::uint64_t seed);

// i.i.d. Gaussian noise.
SeriesR white_noise(std::size_t n, double sigma, std::uint64_t seed);

SeriesR generate(NoiseKind kind, std::size_t n, double sigma, std::uint64_t seed);

// Elementwise J = jbar * (1 + eps). No clipping: J <= 0 is allowed.
SeriesR coupling_series(const SeriesR& eps, double jbar);

void renormalize(std::span<double> values, double sigma);

// Periodogram |X_k|^2 / n for k = 0 .. n/2.
std::vector<double> periodogram(std::span<const double> values);

// Least-squares slope of log psd[k] against log k over k in [lo, hi].
double loglog_slope(std::span<const double> psd, std::size_t lo, std::size_t hi);

bool is_power_of_two(std::size_t n);

}  // namespace toffoli_mf::noise
