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

// Empirical mode decomposition x = sum_k c_k + r.
//
// Envelopes are natural cubic splines through the local extrema, extended
// past both ends by mirroring `mirror_extrema` extrema about the boundary
// sample or the outermost extremum (Rilling-Flandrin-Goncalves boundary
// rule). Sifting stops on the three-threshold criterion: the mean-envelope
// to amplitude ratio exceeds theta1 on at most a fraction alpha of samples,
// never exceeds theta2, and #extrema and #zero crossings differ by at most 1.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace toffoli_mf::emd {

struct EmdOptions {
  double theta1 = 0.05;
  double theta2 = 0.5;
  double alpha = 0.05;
  int max_sift = 100;
  int max_imfs = 40;
  int mirror_extrema = 2;
};

struct ImfSet {
  std::vector<std::vector<double>> imfs;       // c_k
  std::vector<std::vector<double>> envelopes;  // a_k >= 0
  std::vector<double> residual;                // r
  std::vector<double> timescales;              // tau_k in samples
  std::vector<int> sift_iterations;

  std::size_t size() const { return imfs.size(); }
  std::vector<double> reconstruct() const;
};

class EmdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// X(t) = sum_{t' <= t} (f(t') - mean f).
std::vector<double> integrated_path(std::span<const double> f);

ImfSet sift(std::span<const double> x, const EmdOptions& options = {});

// Local extrema (plateaus resolved to their middle sample), endpoints excluded.
struct Extrema {
  std::vector<std::size_t> maxima;
  std::vector<std::size_t> minima;
};
Extrema find_extrema(std::span<const double> x);

std::size_t count_zero_crossings(std::span<const double> x);

// Upper and lower spline envelopes of x. Returns false when x has too few
// extrema for the boundary extension.
bool envelopes(std::span<const double> x, const Extrema& ext, int mirror_extrema,
               std::vector<double>& upper, std::vector<double>& lower);

}  // namespace toffoli_mf::emd
