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

#include "toffoli_mf/damf.hpp"

#include <algorithm>
#include <cmath>

#include "toffoli_mf/simd.hpp"

namespace toffoli_mf::damf {

std::vector<std::size_t> envelope_maxima(std::span<const double> a) {
  return emd::find_extrema(a).maxima;
}

DominantCoefficients dominant_amplitudes(const emd::ImfSet& imfs, int scales, int min_maxima) {
  if (scales < 1) throw AnalysisError("dominant_amplitudes", "need at least one scale");
  if (static_cast<int>(imfs.size()) < scales)
    throw AnalysisError("dominant_amplitudes",
                        "scale " + std::to_string(imfs.size() + 1) + " unusable: only " +
                            std::to_string(imfs.size()) + " IMFs available, need " +
                            std::to_string(scales));
  const std::size_t n = imfs.envelopes.front().size();
  DominantCoefficients out;
  // running[t] = max_{k' <= k} |a_{k'}(t)|
  std::vector<double> running(n, 0.0);
  for (int k = 1; k <= scales; ++k) {
    const auto& a = imfs.envelopes[static_cast<std::size_t>(k - 1)];
    for (std::size_t t = 0; t < n; ++t) running[t] = std::max(running[t], std::abs(a[t]));
    const auto peaks = envelope_maxima(a);
    if (static_cast<int>(peaks.size()) < min_maxima)
      throw AnalysisError("dominant_amplitudes",
                          "scale " + std::to_string(k) + " unusable: envelope has " +
                              std::to_string(peaks.size()) + " maxima, need " +
                              std::to_string(min_maxima));
    std::vector<double> v(peaks.size());
    for (std::size_t i = 0; i < peaks.size(); ++i) {
      const std::size_t lo = i == 0 ? 0 : (peaks[i - 1] + peaks[i] + 1) / 2;
      const std::size_t hi = i + 1 == peaks.size() ? n : (peaks[i] + peaks[i + 1] + 1) / 2;
      v[i] = *std::max_element(running.begin() + static_cast<std::ptrdiff_t>(lo),
                               running.begin() + static_cast<std::ptrdiff_t>(hi));
    }
    out.values.push_back(std::move(v));
    out.positions.push_back(peaks);
  }
  return out;
}

std::vector<double> q_grid(double qmin, double qmax, double qstep) {
  if (!(qstep > 0.0) || !(qmax >= qmin)) throw std::invalid_argument("bad q grid");
  const auto steps = static_cast<long>(std::llround((qmax - qmin) / qstep));
  if (std::abs(qmin + steps * qstep - qmax) > 1e-9 * std::max(1.0, std::abs(qmax)))
    throw std::invalid_argument("q grid bounds are not a whole number of steps apart");
  std::vector<double> q(static_cast<std::size_t>(steps) + 1);
  for (long i = 0; i <= steps; ++i) {
    q[static_cast<std::size_t>(i)] = qmin + static_cast<double>(i) * qstep;
    if (std::abs(q[static_cast<std::size_t>(i)]) < 1e-12 * qstep) q[static_cast<std::size_t>(i)] = 0.0;
  }
  return q;
}

ScalingFit structure_functions(const DominantCoefficients& v, std::span<const double> q) {
  ScalingFit fit;
  fit.q.assign(q.begin(), q.end());
  const auto sum_exp = simd::kernels().sum_exp_affine;
  for (std::size_t k = 0; k < v.scales(); ++k) {
    const auto& vk = v.values[k];
    if (vk.empty()) throw AnalysisError("structure_functions", "scale " + std::to_string(k + 1) + " is empty");
    std::vector<double> lv(vk.size());
    double lmin = HUGE_VAL, lmax = -HUGE_VAL;
    for (std::size_t i = 0; i < vk.size(); ++i) {
      if (!(vk[i] > 0.0) || !std::isfinite(vk[i]))
        throw AnalysisError("structure_functions",
                            "non-positive coefficient at scale " + std::to_string(k + 1));
      lv[i] = std::log(vk[i]);
      lmin = std::min(lmin, lv[i]);
      lmax = std::max(lmax, lv[i]);
    }
    const double log_n = std::log(static_cast<double>(vk.size()));
    std::vector<double> row(q.size());
    for (std::size_t iq = 0; iq < q.size(); ++iq) {
      const double shift = q[iq] >= 0.0 ? q[iq] * lmax : q[iq] * lmin;
      row[iq] = shift + std::log(sum_exp(lv.data(), lv.size(), q[iq], -shift)) - log_n;
    }
    fit.log_s.push_back(std::move(row));
  }
  return fit;
}

void fit_zeta(ScalingFit& fit, const DominantCoefficients& v, std::span<const double> timescales,
              int kmin, int kmax, int min_count) {
  if (kmin < 1) throw AnalysisError("fit_zeta", "kmin must be >= 1");
  if (kmax > static_cast<int>(fit.log_s.size()) || kmax > static_cast<int>(timescales.size()))
    throw AnalysisError("fit_zeta", "kmax = " + std::to_string(kmax) + " exceeds the " +
                                        std::to_string(fit.log_s.size()) + " available scales");
  fit.kmin = kmin;
  fit.kmax = kmax;
  fit.used_scales.clear();
  for (int k = kmin; k <= kmax; ++k) {
    if (static_cast<int>(v.count(k)) < min_count) {
      fit.warnings.push_back("scale " + std::to_string(k) + " excluded: only " +
                             std::to_string(v.count(k)) + " coefficients");
      continue;
    }
    fit.used_scales.push_back(k);
  }
  if (fit.used_scales.size() < 3)
    throw AnalysisError("fit_zeta", "fewer than 3 usable scales in [" + std::to_string(kmin) + ", " +
                                        std::to_string(kmax) + "]");
  const double m = static_cast<double>(fit.used_scales.size());
  double sx = 0.0, sxx = 0.0;
  for (int k : fit.used_scales) {
    const double x = std::log(timescales[static_cast<std::size_t>(k - 1)]);
    sx += x;
    sxx += x * x;
  }
  const double xbar = sx / m;
  const double sxx_c = sxx - m * xbar * xbar;
  fit.zeta.assign(fit.q.size(), 0.0);
  fit.intercept.assign(fit.q.size(), 0.0);
  fit.r2.assign(fit.q.size(), 1.0);
  for (std::size_t iq = 0; iq < fit.q.size(); ++iq) {
    double sy = 0.0, sxy = 0.0;
    for (int k : fit.used_scales) {
      const double x = std::log(timescales[static_cast<std::size_t>(k - 1)]);
      const double y = fit.log_s[static_cast<std::size_t>(k - 1)][iq];
      sy += y;
      sxy += (x - xbar) * y;
    }
    const double ybar = sy / m;
    const double slope = sxy / sxx_c;
    fit.zeta[iq] = slope;
    fit.intercept[iq] = ybar - slope * xbar;
    double ss_tot = 0.0, ss_res = 0.0;
    for (int k : fit.used_scales) {
      const double x = std::log(timescales[static_cast<std::size_t>(k - 1)]);
      const double y = fit.log_s[static_cast<std::size_t>(k - 1)][iq];
      ss_tot += (y - ybar) * (y - ybar);
      const double e = y - (fit.intercept[iq] + slope * x);
      ss_res += e * e;
    }
    fit.r2[iq] = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  }
}

SingularitySpectrum legendre(std::span<const double> q, std::span<const double> zeta) {
  const std::size_t n = q.size();
  if (n < 2 || zeta.size() != n) throw AnalysisError("legendre", "need >= 2 matching q and zeta samples");
  const double h = q[1] - q[0];
  if (!(h > 0.0)) throw AnalysisError("legendre", "q grid must be ascending");
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs((q[i] - q[i - 1]) - h) > 1e-9 * h) throw AnalysisError("legendre", "q grid is not uniform");
  SingularitySpectrum s;
  s.q.assign(q.begin(), q.end());
  s.zeta.assign(zeta.begin(), zeta.end());
  s.alpha.resize(n);
  s.f.resize(n);
  // Central differences inside, second-order one-sided stencils at the ends,
  // so a quadratic zeta is differentiated exactly everywhere.
  for (std::size_t i = 0; i < n; ++i) {
    if (n == 2) s.alpha[i] = (zeta[1] - zeta[0]) / h;
    else if (i == 0) s.alpha[i] = (-3.0 * zeta[0] + 4.0 * zeta[1] - zeta[2]) / (2.0 * h);
    else if (i + 1 == n) s.alpha[i] = (3.0 * zeta[n - 1] - 4.0 * zeta[n - 2] + zeta[n - 3]) / (2.0 * h);
    else s.alpha[i] = (zeta[i + 1] - zeta[i - 1]) / (2.0 * h);
    s.f[i] = s.alpha[i] * q[i] - zeta[i] + 1.0;
  }
  const auto [amin, amax] = std::minmax_element(s.alpha.begin(), s.alpha.end());
  s.width = *amax - *amin;
  s.f_max = *std::max_element(s.f.begin(), s.f.end());
  // The Legendre peak sits at q = 0 (f = 1 - zeta(0)); off-grid, fall back to argmax f.
  std::size_t peak = static_cast<std::size_t>(std::max_element(s.f.begin(), s.f.end()) - s.f.begin());
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(q[i]) <= 1e-9 * h) peak = i;
  s.f_peak = s.f[peak];
  s.alpha_at_peak = s.alpha[peak];
  return s;
}

Analysis analyze(std::span<const double> series, const DamfConfig& config) {
  if (series.size() < 1024)
    throw AnalysisError("analyze", "series needs >= 1024 samples, got " + std::to_string(series.size()));
  std::vector<double> x = config.integrate ? emd::integrated_path(series)
                                           : std::vector<double>(series.begin(), series.end());
  emd::ImfSet imfs;
  try {
    imfs = emd::sift(x, config.emd);
  } catch (const std::exception& e) {
    throw AnalysisError("sift", e.what());
  }
  Analysis out;
  out.imf_count = imfs.size();
  out.timescales = imfs.timescales;
  const auto v = dominant_amplitudes(imfs, config.kmax, config.min_envelope_maxima);
  for (std::size_t k = 0; k < v.scales(); ++k) out.counts.push_back(v.values[k].size());
  const auto q = q_grid(config.qmin, config.qmax, config.qstep);
  out.fit = structure_functions(v, q);
  fit_zeta(out.fit, v, imfs.timescales, config.kmin, config.kmax, config.min_coefficients);
  out.spectrum = legendre(out.fit.q, out.fit.zeta);
  return out;
}

nlohmann::json to_json(const Analysis& a) {
  return {{"q", a.spectrum.q},
          {"zeta", a.spectrum.zeta},
          {"r2", a.fit.r2},
          {"alpha", a.spectrum.alpha},
          {"f", a.spectrum.f},
          {"delta_alpha", a.spectrum.width},
          {"alpha_at_peak", a.spectrum.alpha_at_peak},
          {"f_peak", a.spectrum.f_peak},
          {"f_max", a.spectrum.f_max},
          {"kmin", a.fit.kmin},
          {"kmax", a.fit.kmax},
          {"used_scales", a.fit.used_scales},
          {"timescales", a.timescales},
          {"counts", a.counts},
          {"imf_count", a.imf_count},
          {"warnings", a.fit.warnings}};
}

}  // namespace toffoli_mf::damf
