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

#include "toffoli_mf/emd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "toffoli_mf/spline.hpp"

namespace toffoli_mf::emd {
namespace {

using Index = std::vector<std::size_t>;

// v(a:b) in reverse order, with 1-based inclusive bounds clamped to v.
Index flip_range(const Index& v, long a, long b) {
  a = std::max(a, 1L);
  b = std::min(b, static_cast<long>(v.size()));
  Index out;
  for (long i = b; i >= a; --i) out.push_back(v[static_cast<std::size_t>(i - 1)]);
  return out;
}

void append_mirrored(const Index& idx, std::size_t sym, std::span<const double> x,
                     std::vector<double>& t, std::vector<double>& z) {
  for (std::size_t i : idx) {
    t.push_back(2.0 * static_cast<double>(sym) - static_cast<double>(i));
    z.push_back(x[i]);
  }
}

struct Knots {
  std::vector<double> t, z;
};

// Mirrored boundary extension; false when the extrema do not suffice.
bool boundary_knots(std::span<const double> x, const Extrema& ext, int nbsym, Knots& kmax,
                    Knots& kmin) {
  const Index& imax = ext.maxima;
  const Index& imin = ext.minima;
  if (imax.empty() || imin.empty() || imax.size() + imin.size() < 3) return false;
  const long emax = static_cast<long>(imax.size());
  const long emin = static_cast<long>(imin.size());
  const long nb = nbsym;
  const std::size_t last = x.size() - 1;

  Index lmax, lmin, rmax, rmin;
  std::size_t lsym = 0, rsym = last;
  if (imax.front() < imin.front()) {
    if (x[0] > x[imin.front()]) {
      lmax = flip_range(imax, 2, std::min(emax, nb + 1));
      lmin = flip_range(imin, 1, std::min(emin, nb));
      lsym = imax.front();
    } else {
      lmax = flip_range(imax, 1, std::min(emax, nb));
      lmin = flip_range(imin, 1, std::min(emin, nb - 1));
      lmin.push_back(0);
      lsym = 0;
    }
  } else {
    if (x[0] < x[imax.front()]) {
      lmax = flip_range(imax, 1, std::min(emax, nb));
      lmin = flip_range(imin, 2, std::min(emin, nb + 1));
      lsym = imin.front();
    } else {
      lmax = flip_range(imax, 1, std::min(emax, nb - 1));
      lmax.push_back(0);
      lmin = flip_range(imin, 1, std::min(emin, nb));
      lsym = 0;
    }
  }
  if (imax.back() < imin.back()) {
    if (x[last] < x[imax.back()]) {
      rmax = flip_range(imax, emax - nb + 1, emax);
      rmin = flip_range(imin, emin - nb, emin - 1);
      rsym = imin.back();
    } else {
      rmax = {last};
      const auto tail = flip_range(imax, emax - nb + 2, emax);
      rmax.insert(rmax.end(), tail.begin(), tail.end());
      rmin = flip_range(imin, emin - nb + 1, emin);
      rsym = last;
    }
  } else {
    if (x[last] > x[imin.back()]) {
      rmax = flip_range(imax, emax - nb, emax - 1);
      rmin = flip_range(imin, emin - nb + 1, emin);
      rsym = imax.back();
    } else {
      rmax = flip_range(imax, emax - nb + 1, emax);
      rmin = {last};
      const auto tail = flip_range(imin, emin - nb + 2, emin);
      rmin.insert(rmin.end(), tail.begin(), tail.end());
      rsym = last;
    }
  }

  const auto mirrored_front = [](const Index& v, std::size_t sym) {
    return v.empty() ? std::numeric_limits<double>::infinity()
                     : 2.0 * static_cast<double>(sym) - static_cast<double>(v.front());
  };
  const auto mirrored_back = [](const Index& v, std::size_t sym) {
    return v.empty() ? -std::numeric_limits<double>::infinity()
                     : 2.0 * static_cast<double>(sym) - static_cast<double>(v.back());
  };
  // The mirrored knots must reach past both ends of the series; otherwise
  // mirror about the end sample instead.
  if (mirrored_front(lmin, lsym) > 0.0 || mirrored_front(lmax, lsym) > 0.0) {
    if (lsym == 0) return false;
    if (lsym == imax.front()) lmax = flip_range(imax, 1, std::min(emax, nb));
    else lmin = flip_range(imin, 1, std::min(emin, nb));
    lsym = 0;
  }
  if (mirrored_back(rmin, rsym) < static_cast<double>(last) ||
      mirrored_back(rmax, rsym) < static_cast<double>(last)) {
    if (rsym == last) return false;
    if (rsym == imax.back()) rmax = flip_range(imax, emax - nb + 1, emax);
    else rmin = flip_range(imin, emin - nb + 1, emin);
    rsym = last;
  }

  const auto build = [&](const Index& l, const Index& mid, const Index& r, Knots& k) {
    k.t.clear();
    k.z.clear();
    append_mirrored(l, lsym, x, k.t, k.z);
    for (std::size_t i : mid) {
      k.t.push_back(static_cast<double>(i));
      k.z.push_back(x[i]);
    }
    append_mirrored(r, rsym, x, k.t, k.z);
    // Degenerate mirrors can duplicate a knot; keep the first occurrence.
    std::size_t w = 1;
    for (std::size_t i = 1; i < k.t.size(); ++i) {
      if (k.t[i] > k.t[w - 1]) {
        k.t[w] = k.t[i];
        k.z[w] = k.z[i];
        ++w;
      }
    }
    k.t.resize(w);
    k.z.resize(w);
    return w >= 2;
  };
  return build(lmax, imax, rmax, kmax) && build(lmin, imin, rmin, kmin);
}

struct SiftState {
  std::vector<double> upper, lower;
  Extrema ext;
  bool ok = false;
};

// Evaluates envelopes and the stopping rule for the candidate m. Returns
// true when sifting should stop; `mean` receives the envelope mean.
bool stop_sifting(std::span<const double> m, const EmdOptions& opt, SiftState& st,
                  std::vector<double>& mean) {
  st.ext = find_extrema(m);
  st.ok = envelopes(m, st.ext, opt.mirror_extrema, st.upper, st.lower);
  if (!st.ok) {
    std::fill(mean.begin(), mean.end(), 0.0);
    return true;
  }
  const std::size_t n = m.size();
  std::size_t above1 = 0;
  bool above2 = false;
  for (std::size_t i = 0; i < n; ++i) {
    mean[i] = 0.5 * (st.upper[i] + st.lower[i]);
    const double amp = 0.5 * std::abs(st.upper[i] - st.lower[i]);
    const double ratio = amp > 0.0 ? std::abs(mean[i]) / amp
                                   : (mean[i] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    if (ratio > opt.theta1) ++above1;
    if (ratio > opt.theta2) above2 = true;
  }
  const std::size_t nem = st.ext.maxima.size() + st.ext.minima.size();
  const std::size_t nzm = count_zero_crossings(m);
  const bool keep_going = (static_cast<double>(above1) / static_cast<double>(n) > opt.alpha || above2) &&
                          nem > 2;
  const bool imf_shape = (nem > nzm ? nem - nzm : nzm - nem) <= 1;
  return !keep_going && imf_shape;
}

}  // namespace

std::vector<double> ImfSet::reconstruct() const {
  std::vector<double> x = residual;
  for (const auto& c : imfs)
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += c[i];
  return x;
}

std::vector<double> integrated_path(std::span<const double> f) {
  if (f.empty()) throw std::invalid_argument("integrated path of an empty series");
  // Extended precision keeps the final value at 0 to well below 1e-9 even
  // for large offsets.
  long double total = 0.0L;
  for (double v : f) total += v;
  const long double mean = total / static_cast<long double>(f.size());
  std::vector<double> x(f.size());
  long double s = 0.0L;
  for (std::size_t i = 0; i < f.size(); ++i) {
    s += static_cast<long double>(f[i]) - mean;
    x[i] = static_cast<double>(s);
  }
  return x;
}

Extrema find_extrema(std::span<const double> x) {
  Extrema e;
  const std::size_t n = x.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    if (x[i] != x[i - 1]) {
      const bool rising = x[i] > x[i - 1];
      std::size_t j = i;
      while (j + 1 < n && x[j + 1] == x[i]) ++j;
      if (j + 1 < n) {
        if (rising && x[j + 1] < x[i]) e.maxima.push_back((i + j) / 2);
        else if (!rising && x[j + 1] > x[i]) e.minima.push_back((i + j) / 2);
      }
      i = j + 1;
    } else {
      ++i;
    }
  }
  return e;
}

std::size_t count_zero_crossings(std::span<const double> x) {
  std::size_t count = 0;
  int last = 0;
  for (double v : x) {
    const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

bool envelopes(std::span<const double> x, const Extrema& ext, int mirror_extrema,
               std::vector<double>& upper, std::vector<double>& lower) {
  Knots kmax, kmin;
  if (!boundary_knots(x, ext, mirror_extrema, kmax, kmin)) return false;
  upper.resize(x.size());
  lower.resize(x.size());
  CubicSpline(kmax.t, kmax.z).evaluate_grid(upper);
  CubicSpline(kmin.t, kmin.z).evaluate_grid(lower);
  return true;
}

ImfSet sift(std::span<const double> x, const EmdOptions& opt) {
  const std::size_t n = x.size();
  if (n < 8) throw EmdError("sift: input too short (" + std::to_string(n) + " samples, need >= 8)");
  {
    const auto ext = find_extrema(x);
    if (ext.maxima.size() + ext.minima.size() == 0) {
      bool constant = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
      if (constant) throw EmdError("sift: input is constant (no extrema)");
    }
  }
  for (double v : x)
    if (!std::isfinite(v)) throw EmdError("sift: input contains non-finite values");

  ImfSet out;
  std::vector<double> r(x.begin(), x.end());
  std::vector<double> m(n), mean(n);
  SiftState st;
  double xscale = 0.0;
  for (double v : x) xscale = std::max(xscale, std::abs(v));

  while (static_cast<int>(out.imfs.size()) < opt.max_imfs) {
    const auto ext = find_extrema(r);
    if (ext.maxima.size() + ext.minima.size() < 3) break;
    double rscale = 0.0;
    for (double v : r) rscale = std::max(rscale, std::abs(v));
    if (rscale <= 1e-12 * xscale) break;

    m = r;
    bool stop = stop_sifting(m, opt, st, mean);
    if (!st.ok) break;  // residual cannot be enveloped: treat as trend
    int iterations = 0;
    while (!stop && iterations < opt.max_sift) {
      for (std::size_t i = 0; i < n; ++i) m[i] -= mean[i];
      stop = stop_sifting(m, opt, st, mean);
      ++iterations;
    }

    std::vector<double> amp(n);
    if (envelopes(m, find_extrema(m), opt.mirror_extrema, st.upper, st.lower)) {
      for (std::size_t i = 0; i < n; ++i) amp[i] = 0.5 * std::abs(st.upper[i] - st.lower[i]);
    } else {
      double peak = 0.0;
      for (double v : m) peak = std::max(peak, std::abs(v));
      std::fill(amp.begin(), amp.end(), peak);
    }
    const std::size_t zc = count_zero_crossings(m);
    out.timescales.push_back(2.0 * static_cast<double>(n) / static_cast<double>(std::max<std::size_t>(zc, 1)));
    for (std::size_t i = 0; i < n; ++i) r[i] -= m[i];
    out.imfs.push_back(m);
    out.envelopes.push_back(std::move(amp));
    out.sift_iterations.push_back(iterations);
  }
  out.residual = std::move(r);
  return out;
}

}  // namespace toffoli_mf::emd
