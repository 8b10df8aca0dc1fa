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

// Robustness-shaping objectives for Toffoli pulse synthesis and the
// multi-start optimizer that maximizes them.
//
//   plain:     F(u, jbar)
//   interval:  integral of F(u, J) over the side bands
//              delta1 < |J/jbar - 1| <= delta2 (composite Simpson per band)
//   flatten:   beta [F- + F0 + F+] - |2 F0 - F- - F+| - |F- - F+|
//              with F+- = F(u, jbar +- j0)

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "toffoli_mf/lbfgs.hpp"
#include "toffoli_mf/quantum.hpp"

namespace toffoli_mf::pulse_opt {

enum class ObjectiveKind { plain, weighted_interval, flatten };

std::string_view kind_name(ObjectiveKind kind);
ObjectiveKind parse_kind(std::string_view name);

struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::plain;
  double beta = 0.1;      // flatten only
  double j0 = 0.1;        // in units of jbar
  double delta1 = 0.05;   // in units of jbar
  double delta2 = 0.15;   // in units of jbar
  int quadrature_points = 61;  // per side band, odd
  // Width of the sqrt(x^2 + mu^2) - mu surrogate for |x| in the flatten
  // penalties. Zero evaluates the exact objective.
  double smoothing = 0.0;
  quantum::CouplingConfig coupling;

  void validate() const;
};

// Fidelity |Tr(U^H U_toff)|/8 at coupling j.
double fidelity(const quantum::PulseSet& p, const quantum::CouplingConfig& cfg, double j);

double objective_plain(const quantum::PulseSet& p, const quantum::CouplingConfig& cfg = {});
double objective_weighted_interval(const quantum::PulseSet& p, const ObjectiveSpec& spec);
double objective_flatten(const quantum::PulseSet& p, double beta, const ObjectiveSpec& spec = {});
double objective_value(const quantum::PulseSet& p, const ObjectiveSpec& spec);

// Couplings (absolute, not ratios) and weights such that the objective is
// sum_i weight_i * F(J_i), for the weighted-interval kind.
struct QuadratureRule {
  std::vector<double> j;
  std::vector<double> weight;
};
QuadratureRule interval_quadrature(const ObjectiveSpec& spec);

// The flatten objective as a function of the three fidelities, with its
// partial derivatives (sign(0) = 0 at the kinks when smoothing is zero).
struct FlattenTerms {
  double value;
  double d_minus, d_center, d_plus;
};
FlattenTerms flatten_terms(double f_minus, double f_center, double f_plus, double beta,
                           double smoothing = 0.0);

struct ValueGradient {
  double value = 0.0;
  std::vector<double> gradient;
};

// Exact gradient with respect to the pulse amplitudes.
ValueGradient objective_and_gradient(const quantum::PulseSet& p, const ObjectiveSpec& spec);
std::vector<double> gradient(const quantum::PulseSet& p, const ObjectiveSpec& spec);

std::vector<double> fidelity_sweep(const quantum::PulseSet& p, const quantum::CouplingConfig& cfg,
                                   std::span<const double> j_grid);

struct OptimizeOptions {
  int restarts = 200;
  std::uint64_t seed = 1;
  double init_amplitude = 5.0;  // initial amplitudes uniform in [-A, A], units of jbar
  int nt = 20;
  double tg = 4.18;
  quantum::Layout layout = quantum::Layout::full;
  opt::LbfgsOptions lbfgs;
  // Flatten only: successive smoothing widths; each stage warm-starts the
  // next and the last stage should be 0 (exact objective).
  std::vector<double> smoothing_schedule{1e-3, 1e-5, 0.0};
  unsigned threads = 0;
};

struct RestartRecord {
  std::uint64_t seed = 0;
  double objective = 0.0;
  double gradient_inf = 0.0;
  int iterations = 0;
  std::string status;
  bool converged = false;
};

struct OptimizationReport {
  quantum::PulseSet best = quantum::PulseSet::zeros();
  double objective_value = 0.0;
  double fidelity_at_jbar = 0.0;
  std::size_t best_restart = 0;
  int restarts = 0;
  std::vector<RestartRecord> trace;
  double wall_time = 0.0;
  ObjectiveSpec objective;
};

// Deterministic given options.seed (independent of thread count).
OptimizationReport optimize(const ObjectiveSpec& objective, const OptimizeOptions& options);

// Runs one restart from the given initial amplitudes.
RestartRecord optimize_from(const ObjectiveSpec& objective, const OptimizeOptions& options,
                            quantum::PulseSet& pulses);

nlohmann::json report_to_json(const OptimizationReport& report);

}  // namespace toffoli_mf::pulse_opt
