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

#include "toffoli_mf/noise.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace toffoli_mf::noise {
namespace {

// FFTW's planner is not thread-safe; execution on a private plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

class Plan {
 public:
  explicit Plan(fftw_plan p) : p_(p) {
    if (p_ == nullptr) throw std::runtime_error("FFTW planning failed");
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void execute() const { fftw_execute(p_); }

 private:
  fftw_plan p_;
};

void check_args(std::size_t n, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("noise sigma must be > 0");
  if (n < 2) throw std::invalid_argument("noise length must be >= 2");
}

}  // namespace

std::string_view kind_name(NoiseKind kind) { return kind == NoiseKind::pink ? "pink" : "white"; }

NoiseKind parse_kind(std::string_view name) {
  if (name == "pink") return NoiseKind::pink;
  if (name == "white") return NoiseKind::white;
  throw std::invalid_argument("unknown noise kind '" + std::string(name) + "'");
}

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

void renormalize(std::span<double> values, double sigma) {
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double& v : values) {
    v -= mean;
    ss += v * v;
  }
  const double rms = std::sqrt(ss / n);
  if (!(rms > 0.0)) throw std::runtime_error("cannot renormalize a constant sequence");
  const double scale = sigma / rms;
  for (double& v : values) v *= scale;
  // Remove the O(eps) residual mean left by rounding in the first pass.
  const double residual = std::accumulate(values.begin(), values.end(), 0.0) / n;
  for (double& v : values) v -= residual;
}

SeriesR pink_noise(std::size_t n, double sigma, std::uint64_t seed) {
  check_args(n, sigma);
  if (!is_power_of_two(n))
    throw std::invalid_argument("pink noise length must be a power of two, got " + std::to_string(n));
  const std::size_t half = n / 2;
  auto spec = fftw_buffer<fftw_complex>(half + 1);
  auto out = fftw_buffer<double>(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  spec[0][0] = 0.0;
  spec[0][1] = 0.0;
  for (std::size_t k = 1; k <= half; ++k) {
    const double amp = 1.0 / std::sqrt(static_cast<double>(k));
    spec[k][0] = amp * gauss(rng);
    spec[k][1] = amp * gauss(rng);
  }
  spec[half][1] = 0.0;  // Nyquist bin is real for a real sequence.
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_c2r_1d(static_cast<int>(n), spec.get(), out.get(), FFTW_ESTIMATE));
  }
  plan->execute();
  SeriesR s;
  s.values.assign(out.get(), out.get() + n);
  renormalize(s.values, sigma);
  s.meta = {"pink", seed, sigma};
  return s;
}

SeriesR white_noise(std::size_t n, double sigma, std::uint64_t seed) {
  check_args(n, sigma);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SeriesR s;
  s.values.resize(n);
  for (double& v : s.values) v = gauss(rng);
  renormalize(s.values, sigma);
  s.meta = {"white", seed, sigma};
  return s;
}

SeriesR generate(NoiseKind kind, std::size_t n, double sigma, std::uint64_t seed) {
  return kind == NoiseKind::pink ? pink_noise(n, sigma, seed) : white_noise(n, sigma, seed);
}

SeriesR coupling_series(const SeriesR& eps, double jbar) {
  SeriesR j;
  j.values.resize(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) j.values[i] = jbar * (1.0 + eps.values[i]);
  j.meta = eps.meta;
  j.meta.kind = "coupling";
  return j;
}

std::vector<double> periodogram(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw std::invalid_argument("periodogram needs at least 2 samples");
  auto in = fftw_buffer<double>(n);
  auto spec = fftw_buffer<fftw_complex>(n / 2 + 1);
  std::copy(values.begin(), values.end(), in.get());
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), spec.get(), FFTW_ESTIMATE));
  }
  plan->execute();
  std::vector<double> psd(n / 2 + 1);
  for (std::size_t k = 0; k < psd.size(); ++k)
    psd[k] = (spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1]) / static_cast<double>(n);
  return psd;
}

double loglog_slope(std::span<const double> psd, std::size_t lo, std::size_t hi) {
  if (lo < 1 || hi >= psd.size() || hi <= lo) throw std::invalid_argument("bad slope fit range");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(hi - lo + 1);
  for (std::size_t k = lo; k <= hi; ++k) {
    const double x = std::log(static_cast<double>(k));
    const double y = std::log(psd[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace toffoli_mf::noise
