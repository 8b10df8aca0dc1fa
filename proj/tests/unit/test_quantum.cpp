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

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <random>

#include "toffoli_mf/quantum.hpp"

using namespace toffoli_mf::quantum;

namespace {

// XX + YY on qubits a, b (1-based) built from its action on basis states:
// it maps |..0..1..> <-> |..1..0..> with amplitude 2 and kills aligned pairs.
Matrix8 flip_flop(int a, int b) {
  Matrix8 m = Matrix8::Zero();
  const int ba = 1 << (3 - a), bb = 1 << (3 - b);
  for (int s = 0; s < 8; ++s)
    if (((s & ba) != 0) != ((s & bb) != 0)) m(s ^ ba ^ bb, s) = 2.0;
  return m;
}

Matrix8 taylor_expm(const Matrix8& h, double dt) {
  // exp(-i h dt) by scaling and squaring with a 30-term Taylor series.
  Matrix8 a = cplx(0, -dt) * h;
  int squarings = 0;
  while (a.cwiseAbs().rowwise().sum().maxCoeff() > 0.25) {
    a /= 2.0;
    ++squarings;
  }
  Matrix8 result = Matrix8::Identity(), term = Matrix8::Identity();
  for (int k = 1; k <= 30; ++k) {
    term = term * a / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

PulseSet random_pulses(std::mt19937_64& rng, Layout layout, int nt = 20) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<double> a(static_cast<std::size_t>(nt * control_count(layout)));
  for (auto& x : a) x = u(rng);
  return PulseSet(nt, 4.18, layout, a);
}

double max_abs(const Matrix8& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(quantum, drift_matches_tabulated_matrix) {
  const CouplingConfig cfg;
  const Matrix8 expected = flip_flop(1, 2) + flip_flop(2, 3) + flip_flop(1, 3) / 6.0;
  EXPECT_LT(max_abs(drift_hamiltonian(cfg, 1.0) - expected), 1e-15);
  EXPECT_LT(max_abs(drift_hamiltonian(cfg, 0.0)), 1e-15);
  EXPECT_LT(max_abs(drift_hamiltonian(cfg, 2.5) - 2.5 * expected), 1e-14);
}

TEST(quantum, drift_spectrum) {
  const Matrix8 h = drift_hamiltonian({}, 1.0);
  EXPECT_LT(std::abs(h.trace()), 1e-15);
  // Independent general (non-Hermitian) eigensolver on the tabulated matrix.
  Eigen::ComplexEigenSolver<Matrix8> general(flip_flop(1, 2) + flip_flop(2, 3) + flip_flop(1, 3) / 6.0);
  double largest = -1e300;
  for (int i = 0; i < 8; ++i) largest = std::max(largest, general.eigenvalues()(i).real());
  const auto ev = eigh(h).values;
  EXPECT_NEAR(ev.maxCoeff(), largest, 1e-12);
  EXPECT_NEAR(ev.maxCoeff(), 3.0, 1e-12);
  EXPECT_NEAR(ev.minCoeff(), -8.0 / 3.0, 1e-12);

  // Without the 1-3 coupling the chain is bipartite and the spectrum is
  // symmetric about zero.
  CouplingConfig open;
  open.ratios = {1.0, 1.0, 0.0};
  const auto ev0 = eigh(drift_hamiltonian(open, 1.0)).values;
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(ev0(i), -ev0(7 - i), 1e-12);
}

TEST(quantum, control_hamiltonian_layouts) {
  const auto zero = PulseSet::zeros(4, 1.0, Layout::x_only);
  EXPECT_LT(max_abs(control_hamiltonian(zero, 0)), 1e-15);

  std::vector<double> a(12, 0.0);
  a[0] = 1.0;  // segment 0, ux1
  const PulseSet x(4, 1.0, Layout::x_only, a);
  EXPECT_LT(max_abs(control_hamiltonian(x, 0) - local_pauli(1, Pauli::x)), 1e-15);
  EXPECT_LT(max_abs(control_hamiltonian(x, 1)), 1e-15);

  std::vector<double> s(4, 0.0);
  s[0] = 0.7;  // ux1 = ux3
  s[2] = -0.3;  // uy1 = uy3
  const PulseSet sym(1, 1.0, Layout::symmetric13, s);
  const Matrix8 expect = 0.7 * (local_pauli(1, Pauli::x) + local_pauli(3, Pauli::x)) -
                         0.3 * (local_pauli(1, Pauli::y) + local_pauli(3, Pauli::y));
  EXPECT_LT(max_abs(control_hamiltonian(sym, 0) - expect), 1e-15);
}

TEST(quantum, pulse_set_validation) {
  EXPECT_THROW(PulseSet(0, 1.0, Layout::full, {}), std::invalid_argument);
  EXPECT_THROW(PulseSet(2, 1.0, Layout::full, std::vector<double>(5)), std::invalid_argument);
  EXPECT_THROW(PulseSet(2, -1.0, Layout::full, std::vector<double>(12)), std::invalid_argument);
  const auto p = PulseSet::zeros();
  EXPECT_EQ(p.nt(), 20);
  EXPECT_EQ(p.n_controls(), 6);
  EXPECT_THROW(p.segment(20), std::out_of_range);
  EXPECT_EQ(parse_layout(layout_name(Layout::symmetric13)), Layout::symmetric13);
  EXPECT_EQ(parse_layout("x-only"), Layout::x_only);
}

TEST(quantum, zero_evolution_is_identity) {
  const auto u = propagate(PulseSet::zeros(), {}, 0.0);
  EXPECT_LT(max_abs(u.matrix() - Matrix8::Identity()), 1e-14);
}

TEST(quantum, pi_rotation_on_qubit_one) {
  const double dt = 0.5;
  const PulseSet p(1, dt, Layout::x_only, {std::numbers::pi / 2 / dt, 0.0, 0.0});
  const auto u = propagate(p, {}, 0.0);
  const Matrix8 expected = cplx(0, -1) * local_pauli(1, Pauli::x);
  EXPECT_LT(max_abs(u.matrix() - expected), 1e-10);
}

TEST(quantum, expm_matches_taylor_oracle) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    Matrix8 a;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) a(i, j) = {g(rng), g(rng)};
    const Matrix8 h = (a + a.adjoint()) / 2.0;
    const double dt = 0.05 + 0.5 * std::abs(g(rng));
    ASSERT_LT(max_abs(expm_hermitian(h, dt) - taylor_expm(h, dt)), 1e-11) << "trial " << trial;
  }
}

TEST(quantum, unitarity_on_random_propagations) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> j(-0.5, 2.5);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = random_pulses(rng, trial % 3 == 0 ? Layout::full : trial % 3 == 1 ? Layout::x_only
                                                                                      : Layout::symmetric13);
    worst = std::max(worst, propagate(p, {}, j(rng)).unitarity_error());
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(quantum, segment_splitting_is_consistent) {
  // Halving every segment while keeping each amplitude leaves U unchanged.
  std::mt19937_64 rng(13);
  const auto p = random_pulses(rng, Layout::full, 10);
  std::vector<double> doubled;
  for (int k = 0; k < p.nt(); ++k)
    for (int r = 0; r < 2; ++r)
      for (double v : p.segment(k)) doubled.push_back(v);
  const PulseSet q(20, p.tg(), Layout::full, doubled);
  EXPECT_LT(max_abs(propagate(p, {}, 1.1).matrix() - propagate(q, {}, 1.1).matrix()), 1e-12);
}

TEST(quantum, segment_product_matches_direct_oracle) {
  std::mt19937_64 rng(14);
  const auto p = random_pulses(rng, Layout::full, 5);
  Matrix8 u = Matrix8::Identity();
  for (int k = 0; k < p.nt(); ++k)
    u = taylor_expm(drift_hamiltonian({}, 0.9) + control_hamiltonian(p, k), p.dt()) * u;
  EXPECT_LT(max_abs(propagate(p, {}, 0.9).matrix() - u), 1e-11);
}

TEST(quantum, toffoli_target_properties) {
  const Matrix8& t = toffoli_target().matrix();
  Eigen::Matrix<cplx, 8, 1> e6 = Eigen::Matrix<cplx, 8, 1>::Zero(), e0 = e6;
  e6(6) = 1.0;
  e0(0) = 1.0;
  EXPECT_NEAR(std::abs((t * e6)(7)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs((t * e0)(0)), 1.0, 1e-15);
  EXPECT_LT(max_abs(t * t - Matrix8::Identity()), 1e-15);
}

TEST(quantum, gate_fidelity_examples) {
  const auto& t = toffoli_target();
  EXPECT_NEAR(gate_fidelity(t, t), 1.0, 1e-15);
  EXPECT_NEAR(gate_fidelity(Unitary::identity(), t), 0.75, 1e-15);
  for (double phi : {0.3, 1.7, -2.9}) {
    const auto u = Unitary::from_matrix(std::polar(1.0, phi) * t.matrix());
    EXPECT_NEAR(gate_fidelity(u, t), 1.0, 1e-14);
  }
  EXPECT_THROW(Unitary::from_matrix(2.0 * Matrix8::Identity()), std::invalid_argument);
}

TEST(quantum, overlap_derivatives_match_finite_differences) {
  std::mt19937_64 rng(15);
  for (Layout layout : {Layout::full, Layout::x_only, Layout::symmetric13}) {
    const auto p = random_pulses(rng, layout, 6);
    const double j = 1.05;
    const auto d = overlap_derivatives(p, {}, j, toffoli_target(), true, true);
    EXPECT_LT(std::abs(d.overlap - overlap(p, {}, j, toffoli_target())), 1e-13);
    const double h = 1e-6;
    const cplx fd_j = (overlap(p, {}, j + h, toffoli_target()) - overlap(p, {}, j - h, toffoli_target())) / (2 * h);
    EXPECT_LT(std::abs(fd_j - d.d_j), 1e-8);
    for (std::size_t i = 0; i < p.size(); ++i) {
      auto a = std::vector<double>(p.amplitudes().begin(), p.amplitudes().end());
      a[i] += h;
      const cplx up = overlap(p.with_amplitudes(a), {}, j, toffoli_target());
      a[i] -= 2 * h;
      const cplx down = overlap(p.with_amplitudes(a), {}, j, toffoli_target());
      EXPECT_LT(std::abs((up - down) / (2 * h) - d.d_amplitudes[i]), 1e-8) << "component " << i;
    }
  }
}
