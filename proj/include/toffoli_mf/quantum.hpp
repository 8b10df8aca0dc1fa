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

// Operator algebra for a three-qubit XY chain driven by piecewise-constant
// local fields.
//
// Basis convention: |q1 q2 q3> maps to index 4*q1 + 2*q2 + q3, so qubit 1 is
// the most significant bit. The Toffoli gate uses qubits 1 and 2 as controls
// and qubit 3 as target, i.e. it swaps indices 6 and 7.
//
// Units: hbar = 1 and energies are measured in the nominal coupling jbar.

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <span>
#include <string_view>
#include <vector>

namespace toffoli_mf::quantum {

using cplx = std::complex<double>;
using Matrix8 = Eigen::Matrix<cplx, 8, 8>;
using RealVector8 = Eigen::Matrix<double, 8, 1>;

inline constexpr int kDim = 8;
inline constexpr int kQubits = 3;

// Pauli operator on one qubit (1-based) embedded in the 8-dim space.
enum class Pauli { x, y, z };
Matrix8 local_pauli(int qubit, Pauli axis);

class Unitary {
 public:
  static Unitary identity();
  // Validates U^H U = I to `tolerance` in the max-abs-entry norm.
  static Unitary from_matrix(const Matrix8& m, double tolerance = 1e-10);

  const Matrix8& matrix() const { return m_; }
  double unitarity_error() const;

 private:
  explicit Unitary(const Matrix8& m) : m_(m) {}
  Matrix8 m_;
};

// Couplings J12 = r12*j, J23 = r23*j, J13 = r13*j.
struct CouplingConfig {
  double jbar = 1.0;
  std::array<double, 3> ratios{1.0, 1.0, 1.0 / 6.0};
};

enum class Layout { full, x_only, symmetric13 };

std::string_view layout_name(Layout layout);
Layout parse_layout(std::string_view name);
int control_count(Layout layout);

// Generator matrices G_c with H_c = sum_c u_c G_c. Ordering per layout:
//   full:        ux1, ux2, ux3, uy1, uy2, uy3
//   x_only:      ux1, ux2, ux3
//   symmetric13: ux1 (= ux3), ux2, uy1 (= uy3), uy2
const std::vector<Matrix8>& control_generators(Layout layout);

// Piecewise-constant control amplitudes. Row-major nt x n_controls.
class PulseSet {
 public:
  PulseSet(int nt, double tg, Layout layout, std::vector<double> amplitudes);
  static PulseSet zeros(int nt = 20, double tg = 4.18, Layout layout = Layout::full);

  int nt() const { return nt_; }
  double tg() const { return tg_; }
  double dt() const { return tg_ / nt_; }
  Layout layout() const { return layout_; }
  int n_controls() const { return control_count(layout_); }
  std::size_t size() const { return amplitudes_.size(); }

  std::span<const double> amplitudes() const { return amplitudes_; }
  double amplitude(int segment, int control) const {
    return amplitudes_[static_cast<std::size_t>(segment * n_controls() + control)];
  }
  std::span<const double> segment(int segment) const;

  PulseSet with_amplitudes(std::vector<double> amplitudes) const;

 private:
  int nt_;
  double tg_;
  Layout layout_;
  std::vector<double> amplitudes_;
};

// Coupling-only part of the Hamiltonian for unit j (J_ml = ratio_ml).
Matrix8 drift_unit(const CouplingConfig& cfg);
Matrix8 drift_hamiltonian(const CouplingConfig& cfg, double j);
Matrix8 control_hamiltonian(const PulseSet& p, int segment);

struct HermitianEigen {
  RealVector8 values;
  Matrix8 vectors;  // columns are eigenvectors
};

// Eigendecomposition of a Hermitian matrix. Real symmetric input takes a
// real solver; the result is identical in form.
HermitianEigen eigh(const Matrix8& h);

// exp(-i h dt) for Hermitian h.
Matrix8 expm_hermitian(const Matrix8& h, double dt);
Matrix8 expm_from_eigen(const HermitianEigen& eig, double dt);

// U = prod_{k = nt..1} exp(-i (H0(j) + Hc_k) dt).
Unitary propagate(const PulseSet& p, const CouplingConfig& cfg, double j);

// |Tr(u^H target)| / 8.
double gate_fidelity(const Unitary& u, const Unitary& target);

const Unitary& toffoli_target();

// w = Tr(target^H U) / 8 and its derivatives. |w| is the gate fidelity.
struct OverlapDerivatives {
  cplx overlap;
  std::vector<cplx> d_amplitudes;  // dw/du, same layout as PulseSet amplitudes
  cplx d_j{0.0, 0.0};              // dw/dj
};

OverlapDerivatives overlap_derivatives(const PulseSet& p, const CouplingConfig& cfg, double j,
                                       const Unitary& target, bool want_amplitudes, bool want_j);

// Overlap only (no derivatives); cheaper than propagate + gate_fidelity.
cplx overlap(const PulseSet& p, const CouplingConfig& cfg, double j, const Unitary& target);

}  // namespace toffoli_mf::quantum
