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

// Experiment orchestration: noise ensembles over a sigma grid, fidelity
// series for each pulse set, multifractal widths, and plot data.
//
// Config file format (plain text, one "key = value" per line, '#' comments):
//
//   profile     = desk                # desk | full; sets n_r, n, sigma grid
//   pulse_files = u1.json, u2.json    # relative to the config file
//   labels      = u1, u2              # default: file stems
//   noise       = pink                # pink | white
//   n_r         = 100
//   n           = 32768
//   sigma_grid  = 0.1, 0.2            # or sigma_min / sigma_max / sigma_step
//   seed        = 2024
//   mode        = interpolated        # interpolated | exact
//   output      = results             # relative to the config file
//   threads     = 0                   # 0 = all hardware threads
//   qmin, qmax, qstep, kmin, kmax, integrate
//
// Explicit keys override the profile. Results: <output>/index.json plus
// <output>/cells/<label>_s<sigma>.csv with columns
// realization,seed,delta_alpha,status.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "toffoli_mf/damf.hpp"
#include "toffoli_mf/fidelity_table.hpp"
#include "toffoli_mf/noise.hpp"
#include "toffoli_mf/pulse_io.hpp"

namespace toffoli_mf::pipeline {

struct ExperimentConfig {
  std::vector<std::filesystem::path> pulse_files;
  std::vector<std::string> labels;
  noise::NoiseKind noise = noise::NoiseKind::pink;
  int n_r = 100;
  std::size_t n = 32768;
  std::vector<double> sigma_grid = default_sigma_grid();
  std::uint64_t seed = 2024;
  EvalMode mode = EvalMode::interpolated;
  std::filesystem::path output = "results";
  unsigned threads = 0;
  double jbar = 1.0;
  damf::DamfConfig damf;

  static std::vector<double> default_sigma_grid();  // 0.10 .. 0.50 step 0.01
  static ExperimentConfig desk();  // n_r = 20, sigma in {0.1, 0.2, 0.3, 0.5}
  static ExperimentConfig full();

  void validate() const;
  nlohmann::json to_json() const;
  std::string hash() const;  // 16 hex digits over the canonical JSON
};

// Relative paths are resolved against base_dir.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

// Noise seed for (sigma index, realization); shared by every pulse set.
std::uint64_t realization_seed(std::uint64_t base, std::size_t sigma_index, std::size_t realization);

struct CellResult {
  std::string label;
  double sigma = 0.0;
  std::size_t sigma_index = 0;
  std::vector<std::uint64_t> seeds;       // per realization
  std::vector<double> delta_alpha;        // NaN where the analysis failed
  std::vector<std::string> status;        // "ok" or the error message

  std::vector<double> valid() const;
  std::size_t failures() const;
  double mean() const;
  double stddev() const;  // sample standard deviation (n - 1)
};

struct EnsembleResult {
  ExperimentConfig config;
  std::vector<PulseDocument> pulse_sets;
  std::vector<CellResult> cells;  // pulse-set major, then sigma
  double wall_time = 0.0;

  const CellResult* find(const std::string& label, double sigma) const;
};

// progress(done, total) is called from worker threads after each cell task.
EnsembleResult run_experiment(const ExperimentConfig& config,
                              const std::function<void(std::size_t, std::size_t)>& progress = {});

void save_results(const EnsembleResult& result, const std::filesystem::path& dir);
EnsembleResult load_results(const std::filesystem::path& dir);

enum class Figure { fig1, fig3, fig4 };
Figure parse_figure(const std::string& name);

struct Fig1Grid {
  double lo = 0.0;  // J / jbar
  double hi = 2.0;
  double step = 0.005;
};

// CSV text for the figure. Throws listing any missing or empty cells.
std::string emit_figure_data(const EnsembleResult& result, Figure figure, const Fig1Grid& grid = {});

}  // namespace toffoli_mf::pipeline
