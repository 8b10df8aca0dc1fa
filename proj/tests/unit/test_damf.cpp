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


#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "toffoli_mf/damf.hpp"
#include "toffoli_mf/noise.hpp"

using namespace toffoli_mf;
using namespace toffoli_mf::damf;

namespace {

std::vector<double> white(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

// Dyadic log-normal cascade density on 2^levels cells. Each split multiplies
// the two halves by independent weights exp(s g - s^2 / 2), s^2 = lambda2 ln 2,
// so the measure of a cell of size l scales as l^(q - lambda2 (q^2 - q) / 2).
std::vector<double> cascade(int levels, double lambda2, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const double s = std::sqrt(lambda2 * std::log(2.0));
  std::vector<double> mu{1.0};
  for (int l = 0; l < levels; ++l) {
    std::vector<double> next(mu.size() * 2);
    for (std::size_t i = 0; i < mu.size(); ++i) {
      next[2 * i] = mu[i] * std::exp(s * g(rng) - s * s / 2);
      next[2 * i + 1] = mu[i] * std::exp(s * g(rng) - s * s / 2);
    }
    mu = std::move(next);
  }
  return mu;
}

DominantCoefficients constant_levels(const std::vector<double>& level, std::size_t count) {
  DominantCoefficients v;
  for (double c : level) {
    v.values.emplace_back(count, c);
    v.positions.emplace_back(count, 0);
  }
  return v;
}

}  // namespace

TEST(damf, single_scale_takes_envelope_maxima) {
  emd::ImfSet s;
  std::vector<double> a(200);
  for (std::size_t t = 0; t < a.size(); ++t) a[t] = 2.0 + std::sin(t * 0.3) * (1.0 + t / 100.0);
  s.envelopes.push_back(a);
  s.imfs.push_back(a);
  const auto v = dominant_amplitudes(s, 1, 2);
  const auto peaks = envelope_maxima(a);
  ASSERT_EQ(v.values[0].size(), peaks.size());
  for (std::size_t i = 0; i < peaks.size(); ++i) EXPECT_DOUBLE_EQ(v.values[0][i], a[peaks[i]]);
}

TEST(damf, coarse_scale_inherits_finer_suprema) {
  // a_2 has peaks at 50 and 150; a_1 has one large bump inside each window.
  emd::ImfSet s;
  std::vector<double> a1(200, 0.1), a2(200);
  a1[30] = 5.0;
  a1[170] = 7.0;
  for (std::size_t t = 0; t < 200; ++t) a2[t] = 1.0 + std::cos(2 * M_PI * (t - 50.0) / 100.0);
  s.envelopes = {a1, a2};
  s.imfs = {a1, a2};
  const auto v = dominant_amplitudes(s, 2, 2);
  ASSERT_EQ(v.values[1].size(), 2u);
  EXPECT_EQ(v.values[1][0], 5.0);
  EXPECT_EQ(v.values[1][1], 7.0);
}

TEST(damf, too_few_maxima_names_the_scale) {
  emd::ImfSet s;
  s.envelopes = {std::vector<double>(100, 1.0)};
  s.imfs = s.envelopes;
  try {
    dominant_amplitudes(s, 1, 8);
    FAIL();
  } catch (const AnalysisError& e) {
    EXPECT_NE(std::string(e.what()).find("scale 1"), std::string::npos);
  }
  try {
    dominant_amplitudes(s, 3, 1);
    FAIL();
  } catch (const AnalysisError& e) {
    EXPECT_NE(std::string(e.what()).find("scale 2"), std::string::npos);
  }
}

TEST(damf, structure_function_identities) {
  DominantCoefficients v;
  v.values = {{3.0, 3.0, 3.0}, {0.5, 1.0, 4.0}};
  v.positions = {{0, 1, 2}, {0, 1, 2}};
  const auto q = q_grid(-5, 5, 0.5);
  const auto fit = structure_functions(v, q);
  for (std::size_t i = 0; i < q.size(); ++i) EXPECT_NEAR(fit.log_s[0][i], q[i] * std::log(3.0), 1e-12);
  EXPECT_EQ(fit.log_s[1][10], 0.0);  // q = 0
  EXPECT_NEAR(std::exp(fit.log_s[1][12]), (0.5 + 1.0 + 4.0) / 3.0, 1e-13);  // q = 1
  v.values[1][0] = 0.0;
  EXPECT_THROW(structure_functions(v, q), AnalysisError);
}

TEST(damf, exact_power_law) {
  const std::vector<double> tau{2, 4, 8, 16, 32, 64};
  std::vector<double> level;
  for (double t : tau) level.push_back(std::pow(t, 0.5));
  const auto v = constant_levels(level, 10);
  const auto q = q_grid(-5, 5, 0.5);
  auto fit = structure_functions(v, q);
  fit_zeta(fit, v, tau, 2, 6);
  for (std::size_t i = 0; i < q.size(); ++i) {
    EXPECT_NEAR(fit.zeta[i], 0.5 * q[i], 1e-12);
    EXPECT_NEAR(fit.r2[i], 1.0, 1e-12);
  }
}

TEST(damf, sparse_scales_are_excluded) {
  const std::vector<double> tau{2, 4, 8, 16, 32, 64};
  auto v = constant_levels({1, 2, 3, 4, 5, 6}, 10);
  v.values[5].resize(3);
  const auto q = q_grid(-1, 1, 0.5);
  auto fit = structure_functions(v, q);
  fit_zeta(fit, v, tau, 2, 6);
  EXPECT_EQ(fit.used_scales, (std::vector<int>{2, 3, 4, 5}));
  EXPECT_EQ(fit.warnings.size(), 1u);
  v.values[4].resize(3);
  v.values[3].resize(3);
  fit = structure_functions(v, q);
  EXPECT_THROW(fit_zeta(fit, v, tau, 2, 6), AnalysisError);
}

TEST(damf, legendre_monofractal_and_quadratic) {
  const auto q = q_grid(-5, 5, 0.5);
  std::vector<double> lin, quad;
  for (double x : q) {
    lin.push_back(0.5 * x);
    quad.push_back(0.5 * x - 0.025 * (x * x - x));
  }
  const auto m = legendre(q, lin);
  for (std::size_t i = 0; i < q.size(); ++i) {
    EXPECT_NEAR(m.alpha[i], 0.5, 1e-12);
    EXPECT_NEAR(m.f[i], 1.0, 1e-12);
  }
  EXPECT_NEAR(m.width, 0.0, 1e-12);
  const auto s = legendre(q, quad);
  for (std::size_t i = 0; i < q.size(); ++i) EXPECT_NEAR(s.alpha[i], 0.525 - 0.05 * q[i], 1e-12);
  EXPECT_NEAR(s.width, 0.5, 1e-12);
  EXPECT_NEAR(*std::max_element(s.f.begin(), s.f.end()), 1.0, 1e-12);
  const std::vector<double> bad{0.0, 0.5, 1.5};
  EXPECT_THROW(legendre(bad, bad), AnalysisError);
}

TEST(damf, white_noise_path_is_monofractal) {
  double zeta2 = 0.0, width = 0.0;
  const int runs = 10;
  for (int s = 0; s < runs; ++s) {
    const auto a = analyze(white(1 << 15, 100 + s));
    zeta2 += a.fit.zeta[14] / runs;
    width += a.spectrum.width / runs;
    EXPECT_NEAR(a.fit.zeta[10], 0.0, 1e-9);
    EXPECT_NEAR(a.spectrum.f_peak, 1.0, 1e-6);
    // Concave up to estimator noise.
    for (std::size_t i = 1; i + 1 < a.fit.zeta.size(); ++i)
      EXPECT_LE(a.fit.zeta[i + 1] - 2 * a.fit.zeta[i] + a.fit.zeta[i - 1], 0.02);
  }
  EXPECT_NEAR(zeta2, 1.0, 0.1);
  EXPECT_LE(width, 0.35);
}

TEST(damf, lognormal_cascade_width) {
  double width = 0.0;
  const int runs = 5;
  for (int s = 0; s < runs; ++s) width += analyze(cascade(15, 0.05, 200 + s)).spectrum.width / runs;
  EXPECT_NEAR(width, 0.5, 0.15);
}

TEST(damf, scale_invariance) {
  auto x = white(1 << 15, 7);
  const auto a = analyze(x);
  for (auto& v : x) v *= 1e3;
  const auto b = analyze(x);
  EXPECT_NEAR(a.spectrum.width, b.spectrum.width, 1e-9);
  for (std::size_t i = 0; i < a.fit.zeta.size(); ++i) EXPECT_NEAR(a.fit.zeta[i], b.fit.zeta[i], 1e-9);
}

TEST(damf, pink_noise_is_near_monofractal) {
  // Analyzed directly, not integrated.
  DamfConfig cfg;
  cfg.integrate = false;
  double width = 0.0;
  const int runs = 20;
  for (int s = 0; s < runs; ++s) {
    const auto x = noise::pink_noise(1 << 15, 1.0, 300 + s).values;
    const auto a = analyze(x, cfg);
    for (std::size_t k = 1; k < a.counts.size(); ++k) EXPECT_LT(a.counts[k], a.counts[k - 1]);
    width += a.spectrum.width / runs;
  }
  EXPECT_LE(width, 0.35);
}

TEST(damf, degenerate_input_errors) {
  EXPECT_THROW(analyze(std::vector<double>(4096, 0.9)), AnalysisError);
  EXPECT_THROW(analyze(std::vector<double>(100, 0.0)), AnalysisError);
}

TEST(damf, json_holds_spectrum) {
  const auto j = to_json(analyze(white(1 << 13, 3)));
  for (const char* k : {"q", "zeta", "r2", "alpha", "f", "delta_alpha"}) EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["q"].size(), 21u);
}
