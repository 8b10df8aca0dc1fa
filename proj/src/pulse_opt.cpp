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

#include "toffoli_mf/pulse_opt.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

#include "toffoli_mf/parallel.hpp"

namespace toffoli_mf::pulse_opt {
namespace {

using quantum::PulseSet;

struct FidelityGrad {
  double f;
  std::vector<double> df;
};

FidelityGrad fidelity_and_gradient(const PulseSet& p, const quantum::CouplingConfig& cfg, double j) {
  const auto d = quantum::overlap_derivatives(p, cfg, j, quantum::toffoli_target(), true, false);
  FidelityGrad out{std::abs(d.overlap), std::vector<double>(p.size(), 0.0)};
  // |w| is not differentiable at w = 0; use the zero subgradient there.
  if (out.f > 0.0) {
    const quantum::cplx phase = std::conj(d.overlap) / out.f;
    for (std::size_t i = 0; i < p.size(); ++i) out.df[i] = (phase * d.d_amplitudes[i]).real();
  }
  out.f = std::min(out.f, 1.0);
  return out;
}

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// |x| or its smooth surrogate, and derivative.
inline std::pair<double, double> abs_term(double x, double mu) {
  if (mu <= 0.0) return {std::abs(x), sgn(x)};
  const double r = std::sqrt(x * x + mu * mu);
  return {r - mu, x / r};
}

}  // namespace

std::string_view kind_name(ObjectiveKind kind) {
  switch (kind) {
    case ObjectiveKind::plain: return "plain";
    case ObjectiveKind::weighted_interval: return "interval";
    case ObjectiveKind::flatten: return "flatten";
  }
  return "unknown";
}

ObjectiveKind parse_kind(std::string_view name) {
  if (name == "plain") return ObjectiveKind::plain;
  if (name == "interval" || name == "weighted-interval") return ObjectiveKind::weighted_interval;
  if (name == "flatten") return ObjectiveKind::flatten;
  throw std::invalid_argument("unknown objective kind '" + std::string(name) + "'");
}

void ObjectiveSpec::validate() const {
  if (!(delta1 >= 0.0 && delta1 < delta2))
    throw std::invalid_argument("objective needs 0 <= delta1 < delta2");
  if (!(j0 > 0.0)) throw std::invalid_argument("objective needs j0 > 0");
  if (kind == ObjectiveKind::flatten && !(beta > 0.0))
    throw std::invalid_argument("flatten objective needs beta > 0");
  if (quadrature_points < 3 || quadrature_points % 2 == 0)
    throw std::invalid_argument("Simpson quadrature needs an odd point count >= 3");
  if (smoothing < 0.0) throw std::invalid_argument("smoothing must be >= 0");
}

double fidelity(const PulseSet& p, const quantum::CouplingConfig& cfg, double j) {
  return std::min(1.0, std::abs(quantum::overlap(p, cfg, j, quantum::toffoli_target())));
}

double objective_plain(const PulseSet& p, const quantum::CouplingConfig& cfg) {
  return fidelity(p, cfg, cfg.jbar);
}

QuadratureRule interval_quadrature(const ObjectiveSpec& spec) {
  spec.validate();
  const int n = spec.quadrature_points;
  const double jbar = spec.coupling.jbar;
  const double h = (spec.delta2 - spec.delta1) / (n - 1);
  QuadratureRule rule;
  for (double side : {-1.0, 1.0}) {
    for (int i = 0; i < n; ++i) {
      const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      rule.j.push_back(jbar * (1.0 + side * (spec.delta1 + h * i)));
      rule.weight.push_back(w * h * jbar / 3.0);
    }
  }
  return rule;
}

double objective_weighted_interval(const PulseSet& p, const ObjectiveSpec& spec) {
  const auto rule = interval_quadrature(spec);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.j.size(); ++i) s += rule.weight[i] * fidelity(p, spec.coupling, rule.j[i]);
  return s;
}

FlattenTerms flatten_terms(double fm, double f0, double fp, double beta, double smoothing) {
  const auto [a1, s1] = abs_term(2.0 * f0 - fm - fp, smoothing);
  const auto [a2, s2] = abs_term(fm - fp, smoothing);
  return {beta * (fm + f0 + fp) - a1 - a2, beta + s1 - s2, beta - 2.0 * s1, beta + s1 + s2};
}

double objective_flatten(const PulseSet& p, double beta, const ObjectiveSpec& spec) {
  const auto& cfg = spec.coupling;
  const double dj = spec.j0 * cfg.jbar;
  return flatten_terms(fidelity(p, cfg, cfg.jbar - dj), fidelity(p, cfg, cfg.jbar),
                       fidelity(p, cfg, cfg.jbar + dj), beta, spec.smoothing)
      .value;
}

double objective_value(const PulseSet& p, const ObjectiveSpec& spec) {
  switch (spec.kind) {
    case ObjectiveKind::plain: return objective_plain(p, spec.coupling);
    case ObjectiveKind::weighted_interval: return objective_weighted_interval(p, spec);
    case ObjectiveKind::flatten: return objective_flatten(p, spec.beta, spec);
  }
  throw std::invalid_argument("unknown objective kind");
}

ValueGradient objective_and_gradient(const PulseSet& p, const ObjectiveSpec& spec) {
  const auto& cfg = spec.coupling;
  ValueGradient out;
  switch (spec.kind) {
    case ObjectiveKind::plain: {
      auto fg = fidelity_and_gradient(p, cfg, cfg.jbar);
      out.value = fg.f;
      out.gradient = std::move(fg.df);
      break;
    }
    case ObjectiveKind::weighted_interval: {
      const auto rule = interval_quadrature(spec);
      out.gradient.assign(p.size(), 0.0);
      for (std::size_t i = 0; i < rule.j.size(); ++i) {
        const auto fg = fidelity_and_gradient(p, cfg, rule.j[i]);
        out.value += rule.weight[i] * fg.f;
        for (std::size_t k = 0; k < p.size(); ++k) out.gradient[k] += rule.weight[i] * fg.df[k];
      }
      break;
    }
    case ObjectiveKind::flatten: {
      const double dj = spec.j0 * cfg.jbar;
      const auto m = fidelity_and_gradient(p, cfg, cfg.jbar - dj);
      const auto c = fidelity_and_gradient(p, cfg, cfg.jbar);
      const auto pl = fidelity_and_gradient(p, cfg, cfg.jbar + dj);
      const auto t = flatten_terms(m.f, c.f, pl.f, spec.beta, spec.smoothing);
      out.value = t.value;
      out.gradient.resize(p.size());
      for (std::size_t k = 0; k < p.size(); ++k)
        out.gradient[k] = t.d_minus * m.df[k] + t.d_center * c.df[k] + t.d_plus * pl.df[k];
      break;
    }
  }
  return out;
}

std::vector<double> gradient(const PulseSet& p, const ObjectiveSpec& spec) {
  return objective_and_gradient(p, spec).gradient;
}

std::vector<double> fidelity_sweep(const PulseSet& p, const quantum::CouplingConfig& cfg,
                                   std::span<const double> j_grid) {
  for (std::size_t i = 0; i < j_grid.size(); ++i) {
    if (!std::isfinite(j_grid[i])) throw std::invalid_argument("fidelity sweep grid must be finite");
    if (i > 0 && !(j_grid[i] > j_grid[i - 1]))
      throw std::invalid_argument("fidelity sweep grid must be ascending");
  }
  std::vector<double> out(j_grid.size());
  for (std::size_t i = 0; i < j_grid.size(); ++i) out[i] = fidelity(p, cfg, j_grid[i]);
  return out;
}

RestartRecord optimize_from(const ObjectiveSpec& objective, const OptimizeOptions& options,
                            PulseSet& pulses) {
  std::vector<double> stages{0.0};
  if (objective.kind == ObjectiveKind::flatten && !options.smoothing_schedule.empty())
    stages = options.smoothing_schedule;

  RestartRecord rec;
  std::vector<double> x(pulses.amplitudes().begin(), pulses.amplitudes().end());
  opt::LbfgsResult res;
  for (double mu : stages) {
    ObjectiveSpec spec = objective;
    spec.smoothing = mu;
    const auto fg = [&](std::span<const double> xs, std::span<double> grad) {
      const auto vg = objective_and_gradient(pulses.with_amplitudes({xs.begin(), xs.end()}), spec);
      std::copy(vg.gradient.begin(), vg.gradient.end(), grad.begin());
      return vg.value;
    };
    res = opt::maximize(fg, x, options.lbfgs);
    x = res.x;
    rec.iterations += res.iterations;
  }
  pulses = pulses.with_amplitudes(std::move(x));
  ObjectiveSpec exact = objective;
  exact.smoothing = 0.0;
  const auto final_vg = objective_and_gradient(pulses, exact);
  rec.objective = final_vg.value;
  rec.gradient_inf = 0.0;
  for (double g : final_vg.gradient) rec.gradient_inf = std::max(rec.gradient_inf, std::abs(g));
  rec.converged = rec.gradient_inf <= options.lbfgs.gradient_tolerance;
  rec.status = rec.converged ? "converged" : std::string(opt::status_name(res.status));
  if (!rec.converged && res.status == opt::LbfgsStatus::converged) rec.status = "kink";
  return rec;
}

OptimizationReport optimize(const ObjectiveSpec& objective, const OptimizeOptions& options) {
  objective.validate();
  if (options.restarts < 1) throw std::invalid_argument("optimize needs restarts >= 1");
  const auto t0 = std::chrono::steady_clock::now();

  const auto n = static_cast<std::size_t>(options.restarts);
  const auto nc = static_cast<std::size_t>(quantum::control_count(options.layout));
  std::vector<RestartRecord> trace(n);
  std::vector<std::vector<double>> solutions(n);
  parallel_for(n, options.threads, [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(options.seed, r);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-options.init_amplitude, options.init_amplitude);
    std::vector<double> x(static_cast<std::size_t>(options.nt) * nc);
    for (double& v : x) v = dist(rng);
    PulseSet p(options.nt, options.tg, options.layout, std::move(x));
    trace[r] = optimize_from(objective, options, p);
    trace[r].seed = seed;
    solutions[r].assign(p.amplitudes().begin(), p.amplitudes().end());
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < n; ++r)
    if (trace[r].objective > trace[best].objective) best = r;

  OptimizationReport report;
  report.best = PulseSet(options.nt, options.tg, options.layout, solutions[best]);
  report.objective_value = trace[best].objective;
  report.best_restart = best;
  report.restarts = options.restarts;
  report.trace = std::move(trace);
  report.objective = objective;
  report.fidelity_at_jbar = fidelity(report.best, objective.coupling, objective.coupling.jbar);
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

nlohmann::json report_to_json(const OptimizationReport& report) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& r : report.trace)
    trace.push_back({{"seed", r.seed},
                     {"objective", r.objective},
                     {"gradient_inf", r.gradient_inf},
                     {"iterations", r.iterations},
                     {"status", r.status},
                     {"converged", r.converged}});
  const auto& o = report.objective;
  return {{"objective",
           {{"kind", std::string(kind_name(o.kind))},
            {"beta", o.beta},
            {"j0", o.j0},
            {"delta1", o.delta1},
            {"delta2", o.delta2},
            {"quadrature_points", o.quadrature_points},
            {"jbar", o.coupling.jbar}}},
          {"objective_value", report.objective_value},
          {"fidelity_at_jbar", report.fidelity_at_jbar},
          {"best_restart", report.best_restart},
          {"best_converged", report.trace.at(report.best_restart).converged},
          {"restarts", report.restarts},
          {"wall_time", report.wall_time},
          {"trace", trace}};
}

}  // namespace toffoli_mf::pulse_opt
