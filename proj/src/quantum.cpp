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

#include "toffoli_mf/quantum.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "toffoli_mf/simd.hpp"

namespace toffoli_mf::quantum {
namespace {

constexpr cplx kI{0.0, 1.0};

inline Matrix8 mul(const Matrix8& a, const Matrix8& b) {
  Matrix8 c;
  simd::kernels().cmatmul8(a.data(), b.data(), c.data());
  return c;
}

inline Matrix8 mul_adj(const Matrix8& a, const Matrix8& b) {
  Matrix8 c;
  simd::kernels().cmatmul8_adj(a.data(), b.data(), c.data());
  return c;
}

bool is_real(const Matrix8& h) {
  for (int i = 0; i < 64; ++i)
    if (h.data()[i].imag() != 0.0) return false;
  return true;
}

// Divided difference of f(x) = exp(-i dt x) at eigenvalues a, b. Written via
// sinc so that (near-)degenerate pairs need no special case.
inline cplx exp_divided_difference(double a, double b, double dt) {
  const double x = 0.5 * dt * (a - b);
  const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
  return -kI * dt * std::exp(-kI * (0.5 * dt * (a + b))) * sinc;
}

}  // namespace

Matrix8 local_pauli(int qubit, Pauli axis) {
  if (qubit < 1 || qubit > kQubits) throw std::out_of_range("qubit index must be 1..3");
  const int bit = 1 << (kQubits - qubit);
  Matrix8 m = Matrix8::Zero();
  for (int i = 0; i < kDim; ++i) {
    const bool up = (i & bit) == 0;
    switch (axis) {
      case Pauli::x: m(i ^ bit, i) = 1.0; break;
      case Pauli::y: m(i ^ bit, i) = up ? kI : -kI; break;
      case Pauli::z: m(i, i) = up ? 1.0 : -1.0; break;
    }
  }
  return m;
}

Unitary Unitary::identity() { return Unitary(Matrix8::Identity()); }

Unitary Unitary::from_matrix(const Matrix8& m, double tolerance) {
  Unitary u(m);
  const double err = u.unitarity_error();
  if (!(err <= tolerance))
    throw std::invalid_argument("matrix is not unitary (max |U^H U - I| = " +
                                std::to_string(err) + ")");
  return u;
}

double Unitary::unitarity_error() const {
  const Matrix8 g = m_.adjoint() * m_ - Matrix8::Identity();
  return g.cwiseAbs().maxCoeff();
}

std::string_view layout_name(Layout layout) {
  switch (layout) {
    case Layout::full: return "full";
    case Layout::x_only: return "x-only";
    case Layout::symmetric13: return "symmetric13";
  }
  return "unknown";
}

Layout parse_layout(std::string_view name) {
  if (name == "full") return Layout::full;
  if (name == "x-only" || name == "x_only") return Layout::x_only;
  if (name == "symmetric13") return Layout::symmetric13;
  throw std::invalid_argument("unknown control layout '" + std::string(name) + "'");
}

int control_count(Layout layout) {
  switch (layout) {
    case Layout::full: return 6;
    case Layout::x_only: return 3;
    case Layout::symmetric13: return 4;
  }
  return 0;
}

const std::vector<Matrix8>& control_generators(Layout layout) {
  static const std::vector<Matrix8> full = {
      local_pauli(1, Pauli::x), local_pauli(2, Pauli::x), local_pauli(3, Pauli::x),
      local_pauli(1, Pauli::y), local_pauli(2, Pauli::y), local_pauli(3, Pauli::y)};
  static const std::vector<Matrix8> x_only = {local_pauli(1, Pauli::x), local_pauli(2, Pauli::x),
                                              local_pauli(3, Pauli::x)};
  static const std::vector<Matrix8> sym13 = {
      local_pauli(1, Pauli::x) + local_pauli(3, Pauli::x), local_pauli(2, Pauli::x),
      local_pauli(1, Pauli::y) + local_pauli(3, Pauli::y), local_pauli(2, Pauli::y)};
  switch (layout) {
    case Layout::full: return full;
    case Layout::x_only: return x_only;
    case Layout::symmetric13: return sym13;
  }
  throw std::invalid_argument("unknown control layout");
}

PulseSet::PulseSet(int nt, double tg, Layout layout, std::vector<double> amplitudes)
    : nt_(nt), tg_(tg), layout_(layout), amplitudes_(std::move(amplitudes)) {
  if (nt_ < 1) throw std::invalid_argument("pulse set needs nt >= 1");
  if (!(tg_ > 0.0) || !std::isfinite(tg_)) throw std::invalid_argument("pulse set needs tg > 0");
  const auto expected = static_cast<std::size_t>(nt_) * static_cast<std::size_t>(n_controls());
  if (amplitudes_.size() != expected)
    throw std::invalid_argument("pulse set has " + std::to_string(amplitudes_.size()) +
                                " amplitudes, layout " + std::string(layout_name(layout_)) +
                                " with nt=" + std::to_string(nt_) + " needs " +
                                std::to_string(expected));
  for (double a : amplitudes_)
    if (!std::isfinite(a)) throw std::invalid_argument("pulse amplitudes must be finite");
}

PulseSet PulseSet::zeros(int nt, double tg, Layout layout) {
  return PulseSet(nt, tg, layout,
                  std::vector<double>(static_cast<std::size_t>(nt * control_count(layout)), 0.0));
}

std::span<const double> PulseSet::segment(int segment) const {
  if (segment < 0 || segment >= nt_) throw std::out_of_range("segment index out of range");
  const auto nc = static_cast<std::size_t>(n_controls());
  return std::span<const double>(amplitudes_).subspan(static_cast<std::size_t>(segment) * nc, nc);
}

PulseSet PulseSet::with_amplitudes(std::vector<double> amplitudes) const {
  return PulseSet(nt_, tg_, layout_, std::move(amplitudes));
}

Matrix8 drift_unit(const CouplingConfig& cfg) {
  static const std::array<std::pair<int, int>, 3> pairs{{{1, 2}, {2, 3}, {1, 3}}};
  Matrix8 h = Matrix8::Zero();
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [m, l] = pairs[p];
    h += cfg.ratios[p] * (local_pauli(m, Pauli::x) * local_pauli(l, Pauli::x) +
                          local_pauli(m, Pauli::y) * local_pauli(l, Pauli::y));
  }
  return h;
}

Matrix8 drift_hamiltonian(const CouplingConfig& cfg, double j) { return j * drift_unit(cfg); }

Matrix8 control_hamiltonian(const PulseSet& p, int segment) {
  const auto u = p.segment(segment);
  const auto& gens = control_generators(p.layout());
  Matrix8 h = Matrix8::Zero();
  for (std::size_t c = 0; c < u.size(); ++c) h += u[c] * gens[c];
  return h;
}

HermitianEigen eigh(const Matrix8& h) {
  HermitianEigen out;
  if (is_real(h)) {
    const Eigen::Matrix<double, 8, 8> hr = h.real();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 8, 8>> solver(hr);
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix8> solver(h);
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
  }
  return out;
}

Matrix8 expm_from_eigen(const HermitianEigen& eig, double dt) {
  Matrix8 vd = eig.vectors;
  for (int c = 0; c < kDim; ++c) vd.col(c) *= std::exp(-kI * (dt * eig.values(c)));
  const Matrix8 vh = eig.vectors.adjoint();
  return mul(vd, vh);
}

Matrix8 expm_hermitian(const Matrix8& h, double dt) { return expm_from_eigen(eigh(h), dt); }

Unitary propagate(const PulseSet& p, const CouplingConfig& cfg, double j) {
  const Matrix8 h0 = drift_hamiltonian(cfg, j);
  Matrix8 u = Matrix8::Identity();
  for (int k = 0; k < p.nt(); ++k) {
    const Matrix8 uk = expm_hermitian(h0 + control_hamiltonian(p, k), p.dt());
    u = mul(uk, u);
  }
  return Unitary::from_matrix(u, 1e-8);
}

double gate_fidelity(const Unitary& u, const Unitary& target) {
  const cplx tr = (u.matrix().adjoint() * target.matrix()).trace();
  return std::min(1.0, std::abs(tr) / kDim);
}

const Unitary& toffoli_target() {
  static const Unitary target = [] {
    Matrix8 m = Matrix8::Identity();
    m(6, 6) = 0.0;
    m(7, 7) = 0.0;
    m(6, 7) = 1.0;
    m(7, 6) = 1.0;
    return Unitary::from_matrix(m);
  }();
  return target;
}

cplx overlap(const PulseSet& p, const CouplingConfig& cfg, double j, const Unitary& target) {
  const Matrix8 h0 = drift_hamiltonian(cfg, j);
  Matrix8 u = Matrix8::Identity();
  for (int k = 0; k < p.nt(); ++k) u = mul(expm_hermitian(h0 + control_hamiltonian(p, k), p.dt()), u);
  return mul_adj(target.matrix(), u).trace() / static_cast<double>(kDim);
}

OverlapDerivatives overlap_derivatives(const PulseSet& p, const CouplingConfig& cfg, double j,
                                       const Unitary& target, bool want_amplitudes, bool want_j) {
  const int nt = p.nt();
  const double dt = p.dt();
  const Matrix8 h0u = drift_unit(cfg);
  const Matrix8 h0 = j * h0u;
  const auto& gens = control_generators(p.layout());
  const int nc = p.n_controls();

  std::vector<HermitianEigen> eig(static_cast<std::size_t>(nt));
  std::vector<Matrix8> seg(static_cast<std::size_t>(nt));
  // prefix[k] = U_{k-1} ... U_0
  std::vector<Matrix8> prefix(static_cast<std::size_t>(nt) + 1);
  prefix[0] = Matrix8::Identity();
  for (int k = 0; k < nt; ++k) {
    eig[k] = eigh(h0 + control_hamiltonian(p, k));
    seg[k] = expm_from_eigen(eig[k], dt);
    prefix[k + 1] = mul(seg[k], prefix[k]);
  }

  OverlapDerivatives out;
  out.overlap = mul_adj(target.matrix(), prefix[nt]).trace() / static_cast<double>(kDim);
  if (!want_amplitudes && !want_j) return out;
  if (want_amplitudes) out.d_amplitudes.assign(p.size(), cplx(0.0, 0.0));

  // suffix = target^H U_{nt-1} ... U_{k+1}, built backwards.
  Matrix8 suffix = target.matrix().adjoint();
  Matrix8 gamma;
  for (int k = nt - 1; k >= 0; --k) {
    const Matrix8& v = eig[k].vectors;
    for (int b = 0; b < kDim; ++b)
      for (int a = 0; a < kDim; ++a)
        gamma(a, b) = exp_divided_difference(eig[k].values(a), eig[k].values(b), dt);
    // dw = Tr(M dU_k) / 8 with M = prefix_k * suffix_k; in the eigenbasis
    // dU_k = V (X o Gamma) V^H, so dw = sum_ab Mt(b, a) X(a, b) Gamma(a, b).
    const Matrix8 mt = mul_adj(v, mul(mul(prefix[k], suffix), v));
    const auto contract = [&](const Matrix8& x) {
      cplx s(0.0, 0.0);
      for (int b = 0; b < kDim; ++b)
        for (int a = 0; a < kDim; ++a) s += mt(b, a) * x(a, b) * gamma(a, b);
      return s / static_cast<double>(kDim);
    };
    if (want_amplitudes) {
      for (int c = 0; c < nc; ++c)
        out.d_amplitudes[static_cast<std::size_t>(k * nc + c)] = contract(mul_adj(v, mul(gens[c], v)));
    }
    if (want_j) out.d_j += contract(mul_adj(v, mul(h0u, v)));
    suffix = mul(suffix, seg[k]);
  }
  return out;
}

}  // namespace toffoli_mf::quantum
