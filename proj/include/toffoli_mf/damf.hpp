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

// Dominant-amplitude multifractal analysis on top of EMD.
//
// For scale k (1-based) and the i-th local maximum of the envelope a_k, the
// dominant coefficient is
//
//   v_{k,i} = max_{t in I_{k,i}} max_{k' <= k} |a_{k'}(t)|
//
// where I_{k,i} runs from the midpoint with the previous maximum of a_k to
// the midpoint with the next one (half-open; the first and last windows
// extend to the series ends). Structure functions S_k(q) = <v_{k,.}^q> are
// regressed against the mean IMF timescales tau_k, giving zeta(q); the
// singularity spectrum follows from alpha = dzeta/dq, f = alpha q - zeta + 1.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "toffoli_mf/emd.hpp"

namespace toffoli_mf::damf {

class AnalysisError : public std::runtime_error {
 public:
  AnalysisError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct DominantCoefficients {
  // values[k-1][i] and positions[k-1][i] for scale k.
  std::vector<std::vector<double>> values;
  std::vector<std::vector<std::size_t>> positions;

  std::size_t scales() const { return values.size(); }
  std::size_t count(int k) const { return values.at(static_cast<std::size_t>(k - 1)).size(); }
};

// Local maxima of an envelope (plateaus resolved to their middle sample).
std::vector<std::size_t> envelope_maxima(std::span<const double> a);

// Coefficients for scales 1..scales. Throws AnalysisError naming the first
// scale whose envelope has fewer than min_maxima local maxima.
DominantCoefficients dominant_amplitudes(const emd::ImfSet& imfs, int scales, int min_maxima = 8);

struct ScalingFit {
  std::vector<double> q;
  std::vector<std::vector<double>> log_s;  // log S_k(q), [k-1][iq]
  std::vector<double> zeta;
  std::vector<double> intercept;
  std::vector<double> r2;
  int kmin = 2;
  int kmax = 6;
  std::vector<int> used_scales;
  std::vector<std::string> warnings;
};

std::vector<double> q_grid(double qmin, double qmax, double qstep);

// S only. Log domain; throws when a coefficient is not strictly positive.
ScalingFit structure_functions(const DominantCoefficients& v, std::span<const double> q);

// Least-squares slope of log S_k(q) against log tau_k over k in [kmin, kmax],
// skipping scales with fewer than min_count coefficients.
void fit_zeta(ScalingFit& fit, const DominantCoefficients& v, std::span<const double> timescales,
              int kmin, int kmax, int min_count = 4);

struct SingularitySpectrum {
  std::vector<double> q;
  std::vector<double> zeta;
  std::vector<double> alpha;
  std::vector<double> f;
  double width = 0.0;  // max alpha - min alpha over the grid
  // Spectrum peak: the q = 0 point, where f = 1 - zeta(0). With a non-concave
  // estimated zeta the parametric f can exceed 1 elsewhere; f_max reports it.
  double alpha_at_peak = 0.0;
  double f_peak = 0.0;
  double f_max = 0.0;
};

SingularitySpectrum legendre(std::span<const double> q, std::span<const double> zeta);

struct DamfConfig {
  double qmin = -5.0;
  double qmax = 5.0;
  double qstep = 0.5;
  int kmin = 2;
  int kmax = 6;
  bool integrate = true;
  int min_envelope_maxima = 8;
  int min_coefficients = 4;
  emd::EmdOptions emd;
};

struct Analysis {
  ScalingFit fit;
  SingularitySpectrum spectrum;
  std::vector<double> timescales;
  std::vector<std::size_t> counts;  // n_k
  std::size_t imf_count = 0;
};

// integrated_path (optional) -> sift -> dominant_amplitudes ->
// structure_functions -> fit_zeta -> legendre.
Analysis analyze(std::span<const double> series, const DamfConfig& config = {});

nlohmann::json to_json(const Analysis& a);

}  // namespace toffoli_mf::damf
