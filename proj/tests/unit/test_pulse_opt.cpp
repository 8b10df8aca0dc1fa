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

#include "toffoli_mf/lbfgs.hpp"
#include "toffoli_mf/pulse_opt.hpp"

using namespace toffoli_mf;
using namespace toffoli_mf::pulse_opt;
using quantum::Layout;
using quantum::PulseSet;

namespace {

PulseSet random_pulses(std::mt19937_64& rng, int nt, Layout layout = Layout::full) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<double> a(static_cast<std::size_t>(nt * quantum::control_count(layout)));
  for (auto& x : a) x = u(rng);
  return PulseSet(nt, 4.18, layout, a);
}

// max_i |g_i - fd_i| / max_i |fd_i| with central differences.
double gradient_error(const PulseSet& p, const ObjectiveSpec& spec) {
  const auto g = gradient(p, spec);
  const double h = 1e-6;
  double err = 0.0, scale = 0.0;
  std::vector<double> a(p.amplitudes().begin(), p.amplitudes().end());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double keep = a[i];
    a[i] = keep + h;
    const double up = objective_value(p.with_amplitudes(a), spec);
    a[i] = keep - h;
    const double down = objective_value(p.with_amplitudes(a), spec);
    a[i] = keep;
    const double fd = (up - down) / (2 * h);
    err = std::max(err, std::abs(fd - g[i]));
    scale = std::max(scale, std::abs(fd));
  }
  return err / scale;
}

}  // namespace

TEST(pulse_opt, zero_pulses_equal_drift_only_fidelity) {
  const auto p = PulseSet::zeros();
  const quantum::CouplingConfig cfg;
  quantum::Matrix8 h = quantum::drift_hamiltonian(cfg, 1.0);
  const auto u = quantum::Unitary::from_matrix(quantum::expm_hermitian(h, 4.18));
  EXPECT_NEAR(objective_plain(p, cfg), quantum::gate_fidelity(u, quantum::toffoli_target()), 1e-12);
}

TEST(pulse_opt, plain_value_is_a_fidelity) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const double f = objective_plain(random_pulses(rng, 20));
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
  }
}

TEST(pulse_opt, interval_quadrature_measures_the_support) {
  ObjectiveSpec spec;
  spec.kind = ObjectiveKind::weighted_interval;
  const auto rule = interval_quadrature(spec);
  ASSERT_EQ(rule.j.size(), 122u);
  double total = 0.0;
  for (double w : rule.weight) total += w;
  EXPECT_NEAR(total, 0.2, 1e-13);
  for (double j : rule.j) {
    const double d = std::abs(j - 1.0);
    EXPECT_GE(d, 0.05 - 1e-12);
    EXPECT_LE(d, 0.15 + 1e-12);
  }
  // Simpson integrates cubics exactly: int over both bands of (J-1)^2 dJ.
  double m2 = 0.0;
  for (std::size_t i = 0; i < rule.j.size(); ++i) m2 += rule.weight[i] * std::pow(rule.j[i] - 1.0, 2);
  EXPECT_NEAR(m2, 2.0 * (std::pow(0.15, 3) - std::pow(0.05, 3)) / 3.0, 1e-15);
}

TEST(pulse_opt, flatten_terms_examples) {
  for (double f : {0.0, 0.4, 1.0}) EXPECT_NEAR(flatten_terms(f, f, f, 0.1).value, 0.3 * f, 1e-15);
  EXPECT_NEAR(flatten_terms(0.0, 1.0, 0.0, 0.1).value, 0.1 - 2.0, 1e-15);
  EXPECT_NEAR(flatten_terms(0.0, 1.0, 0.0, 1000.0).value, 1000.0 - 2.0, 1e-12);
  // Smoothed surrogate approaches the exact value.
  EXPECT_NEAR(flatten_terms(0.2, 0.9, 0.5, 0.1, 1e-9).value, flatten_terms(0.2, 0.9, 0.5, 0.1).value, 1e-8);
}

TEST(pulse_opt, spec_validation) {
  ObjectiveSpec s;
  s.quadrature_points = 60;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.delta1 = 0.2;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  EXPECT_EQ(parse_kind("interval"), ObjectiveKind::weighted_interval);
  EXPECT_THROW(parse_kind("bogus"), std::invalid_argument);
}

TEST(pulse_opt, gradients_match_finite_differences) {
  std::mt19937_64 rng(2);
  for (auto kind : {ObjectiveKind::plain, ObjectiveKind::weighted_interval, ObjectiveKind::flatten}) {
    ObjectiveSpec spec;
    spec.kind = kind;
    spec.quadrature_points = 11;
    for (int trial = 0; trial < 5; ++trial) {
      const auto p = random_pulses(rng, 6, trial % 2 ? Layout::full : Layout::symmetric13);
      EXPECT_LE(gradient_error(p, spec), 1e-5) << kind_name(kind) << " trial " << trial;
    }
  }
  ObjectiveSpec plain;
  EXPECT_LE(gradient_error(PulseSet::zeros(), plain), 1e-5);
}

TEST(pulse_opt, value_and_gradient_agree_with_value) {
  std::mt19937_64 rng(3);
  ObjectiveSpec spec;
  spec.kind = ObjectiveKind::flatten;
  spec.beta = 10.0;
  const auto p = random_pulses(rng, 20);
  EXPECT_NEAR(objective_and_gradient(p, spec).value, objective_value(p, spec), 1e-13);
}

TEST(pulse_opt, fidelity_sweep_validates_grid) {
  const auto p = PulseSet::zeros();
  const std::vector<double> bad{1.0, 0.5};
  EXPECT_THROW(fidelity_sweep(p, {}, bad), std::invalid_argument);
  const std::vector<double> good{0.5, 1.0, 1.5};
  const auto f = fidelity_sweep(p, {}, good);
  EXPECT_NEAR(f[1], objective_plain(p), 1e-15);
}

TEST(pulse_opt, lbfgs_maximizes_a_quadratic) {
  // f(x) = -sum (i+1) (x_i - 1)^2 has its maximum 0 at x = 1.
  const auto fg = [](std::span<const double> x, std::span<double> g) {
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double w = static_cast<double>(i + 1);
      f -= w * (x[i] - 1.0) * (x[i] - 1.0);
      g[i] = -2.0 * w * (x[i] - 1.0);
    }
    return f;
  };
  const auto r = opt::maximize(fg, std::vector<double>(8, -3.0));
  EXPECT_TRUE(r.converged());
  for (double v : r.x) EXPECT_NEAR(v, 1.0, 1e-6);
}

TEST(pulse_opt, optimize_is_deterministic) {
  ObjectiveSpec spec;
  OptimizeOptions o;
  o.restarts = 2;
  o.seed = 9;
  o.threads = 2;
  const auto a = optimize(spec, o);
  o.threads = 1;
  const auto b = optimize(spec, o);
  EXPECT_EQ(report_to_json(a)["trace"], report_to_json(b)["trace"]);
  EXPECT_EQ(std::vector<double>(a.best.amplitudes().begin(), a.best.amplitudes().end()),
            std::vector<double>(b.best.amplitudes().begin(), b.best.amplitudes().end()));
  EXPECT_LE(a.fidelity_at_jbar, 1.0);
}

TEST(pulse_opt, converged_restart_has_small_gradient) {
  ObjectiveSpec spec;
  OptimizeOptions o;
  o.restarts = 4;
  o.seed = 3;
  const auto r = optimize(spec, o);
  const auto& best = r.trace.at(r.best_restart);
  if (best.converged) EXPECT_LE(best.gradient_inf, 1e-6);
  EXPECT_NEAR(r.objective_value, objective_value(r.best, spec), 1e-12);
}
