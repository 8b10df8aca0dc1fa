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

#include "toffoli_mf/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace toffoli_mf::opt {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double inf_norm(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

struct Pair {
  std::vector<double> s, y;
  double rho;
};

// Two-loop recursion on the minimization gradient g; returns descent d.
std::vector<double> two_loop(const std::deque<Pair>& pairs, std::span<const double> g) {
  std::vector<double> q(g.begin(), g.end());
  std::vector<double> alpha(pairs.size());
  for (std::size_t i = pairs.size(); i-- > 0;) {
    alpha[i] = pairs[i].rho * dot(pairs[i].s, q);
    for (std::size_t k = 0; k < q.size(); ++k) q[k] -= alpha[i] * pairs[i].y[k];
  }
  if (!pairs.empty()) {
    const auto& last = pairs.back();
    const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
    for (double& v : q) v *= gamma;
  }
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double beta = pairs[i].rho * dot(pairs[i].y, q);
    for (std::size_t k = 0; k < q.size(); ++k) q[k] += pairs[i].s[k] * (alpha[i] - beta);
  }
  for (double& v : q) v = -v;
  return q;
}

}  // namespace

std::string_view status_name(LbfgsStatus status) {
  switch (status) {
    case LbfgsStatus::converged: return "converged";
    case LbfgsStatus::max_iterations: return "max_iterations";
    case LbfgsStatus::line_search_failed: return "line_search_failed";
    case LbfgsStatus::stalled: return "stalled";
  }
  return "unknown";
}

LbfgsResult maximize(const ValueAndGradient& fg, std::vector<double> x0,
                     const LbfgsOptions& options) {
  const std::size_t n = x0.size();
  LbfgsResult res;
  // Internally minimize phi = -f.
  std::vector<double> g(n);
  const auto eval = [&](std::span<const double> x, std::vector<double>& grad) {
    ++res.evaluations;
    const double f = fg(x, grad);
    for (double& v : grad) v = -v;
    return -f;
  };

  std::vector<double> x = std::move(x0);
  double phi = eval(x, g);
  std::deque<Pair> pairs;
  std::vector<double> xt(n), gt(n), best_x(n), best_g(n);
  int stall = 0;
  res.status = LbfgsStatus::max_iterations;

  for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
    if (inf_norm(g) <= options.gradient_tolerance) {
      res.status = LbfgsStatus::converged;
      break;
    }
    std::vector<double> d = two_loop(pairs, g);
    double slope = dot(g, d);
    if (!(slope < 0.0)) {
      pairs.clear();
      d = g;
      for (double& v : d) v = -v;
      slope = dot(g, d);
    }

    double t = pairs.empty() ? std::min(1.0, 1.0 / std::max(inf_norm(g), 1e-300)) : 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    bool accepted = false;
    double best_phi = phi;
    double phit = phi;
    for (int ls = 0; ls < options.max_line_search; ++ls) {
      for (std::size_t k = 0; k < n; ++k) xt[k] = x[k] + t * d[k];
      phit = eval(xt, gt);
      if (std::isfinite(phit) && phit < best_phi) {
        best_phi = phit;
        best_x = xt;
        best_g = gt;
      }
      if (!std::isfinite(phit) || phit > phi + options.armijo * t * slope) {
        hi = t;
      } else if (dot(gt, d) < options.wolfe * slope) {
        lo = t;
      } else {
        accepted = true;
        break;
      }
      t = std::isinf(hi) ? 2.0 * lo : 0.5 * (lo + hi);
      if (!std::isinf(hi) && hi - lo < 1e-16 * std::max(1.0, hi)) break;
    }
    if (!accepted) {
      if (best_phi < phi) {
        xt = best_x;
        gt = best_g;
        phit = best_phi;
      } else {
        res.status = LbfgsStatus::line_search_failed;
        break;
      }
    }

    Pair pr{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t k = 0; k < n; ++k) {
      pr.s[k] = xt[k] - x[k];
      pr.y[k] = gt[k] - g[k];
    }
    const double sy = dot(pr.s, pr.y);
    if (sy > 1e-12 * std::sqrt(dot(pr.s, pr.s) * dot(pr.y, pr.y))) {
      pr.rho = 1.0 / sy;
      pairs.push_back(std::move(pr));
      if (static_cast<int>(pairs.size()) > options.memory) pairs.pop_front();
    }

    const double improvement = phi - phit;
    stall = improvement <= options.stall_tolerance * std::max(1.0, std::abs(phi)) ? stall + 1 : 0;
    x.swap(xt);
    g.swap(gt);
    phi = phit;
    res.history.push_back(-phi);
    if (stall >= options.stall_iterations) {
      res.status = inf_norm(g) <= options.gradient_tolerance ? LbfgsStatus::converged
                                                             : LbfgsStatus::stalled;
      ++res.iterations;
      break;
    }
  }
  if (res.status == LbfgsStatus::max_iterations && inf_norm(g) <= options.gradient_tolerance)
    res.status = LbfgsStatus::converged;

  res.x = std::move(x);
  res.value = -phi;
  res.gradient = std::move(g);
  for (double& v : res.gradient) v = -v;
  return res;
}

}  // namespace toffoli_mf::opt
