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
#include <filesystem>
#include <fstream>
#include <random>

#include "toffoli_mf/fidelity_table.hpp"
#include "toffoli_mf/noise.hpp"
#include "toffoli_mf/pipeline.hpp"
#include "toffoli_mf/pulse_io.hpp"
#include "toffoli_mf/pulse_opt.hpp"
#include "toffoli_mf/series_io.hpp"

using namespace toffoli_mf;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("toffoli_mf_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

quantum::PulseSet random_pulses(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> a(120);
  for (auto& x : a) x = u(rng);
  return quantum::PulseSet(20, 4.18, quantum::Layout::full, a);
}

// Two quick pulse files in dir, labelled a and b.
std::vector<fs::path> write_pulses(const fs::path& dir) {
  std::vector<fs::path> files;
  for (int i = 0; i < 2; ++i) {
    PulseDocument doc{random_pulses(10 + i), {}};
    doc.meta.fidelity_at_jbar = pulse_opt::objective_plain(doc.pulses);
    files.push_back(dir / (i == 0 ? "a.json" : "b.json"));
    save_pulse_document(files.back(), doc);
  }
  return files;
}

}  // namespace

TEST(io, pulse_document_round_trip) {
  const auto dir = scratch("pulse");
  PulseDocument doc{random_pulses(1), {"flatten", 0.1, 42, 0.93}};
  save_pulse_document(dir / "p.json", doc);
  const auto back = load_pulse_document(dir / "p.json");
  EXPECT_EQ(std::vector<double>(back.pulses.amplitudes().begin(), back.pulses.amplitudes().end()),
            std::vector<double>(doc.pulses.amplitudes().begin(), doc.pulses.amplitudes().end()));
  EXPECT_EQ(back.pulses.layout(), quantum::Layout::full);
  EXPECT_EQ(back.meta.objective, "flatten");
  EXPECT_EQ(back.meta.seed, 42u);
  auto j = to_json(doc);
  EXPECT_EQ(j["schema"], 1);
  j["schema"] = 2;
  EXPECT_THROW(pulse_document_from_json(j), std::runtime_error);
}

TEST(io, series_csv_round_trip) {
  const auto dir = scratch("series");
  const auto s = noise::pink_noise(1024, 0.2, 5);
  write_series_csv(dir / "eps.csv", s, "eps");
  const auto back = read_series_csv(dir / "eps.csv");
  EXPECT_EQ(back.values, s.values);
  EXPECT_EQ(back.meta.kind, "pink");
  EXPECT_EQ(back.meta.seed, 5u);
  EXPECT_DOUBLE_EQ(back.meta.sigma, 0.2);
}

TEST(io, key_values) {
  const auto kv = parse_key_values("# c\n[x]\na = 1\nb = \"two\"  # trailing\n\na = 3\n");
  EXPECT_EQ(kv.at("a"), "3");
  EXPECT_EQ(kv.at("b"), "two");
  EXPECT_THROW(parse_key_values("nonsense\n"), std::runtime_error);
}

TEST(fidelity_table, matches_exact_propagation) {
  const auto p = random_pulses(3);
  const FidelityTable table(p, {});
  EXPECT_LE(table.certified_error(), 1e-6);
  // One realization of coupling noise.
  const auto j = noise::coupling_series(noise::pink_noise(4096, 0.3, 1), 1.0);
  std::vector<double> f(j.size());
  table.evaluate(j.values, f);
  const auto exact = fidelity_series(p, {}, j.values, EvalMode::exact);
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    worst = std::max(worst, std::abs(f[i] - exact[i]));
    EXPECT_GE(f[i], 0.0);
    EXPECT_LE(f[i], 1.0);
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(fidelity_table, falls_back_outside_the_grid) {
  const auto p = random_pulses(4);
  const FidelityTable table(p, {}, {.lo = 0.5, .hi = 1.5, .points = 1001, .probes = 10});
  for (double j : {-1.0, 0.2, 3.0}) EXPECT_EQ(table(j), table.exact(j));
}

TEST(fidelity_table, constant_coupling_gives_constant_series) {
  const auto p = random_pulses(5);
  const std::vector<double> j(64, 1.0);
  const auto f = fidelity_series(p, {}, j, EvalMode::interpolated);
  for (double v : f) EXPECT_NEAR(v, pulse_opt::objective_plain(p), 1e-6);
}

TEST(pipeline, config_parsing) {
  const auto c = pipeline::parse_config(
      "profile = desk\npulse_files = [\"u1.json\", \"u2.json\"]\nseed = 9\nmode = exact\n", "/data");
  EXPECT_EQ(c.n_r, 20);
  EXPECT_EQ(c.sigma_grid, (std::vector<double>{0.1, 0.2, 0.3, 0.5}));
  EXPECT_EQ(c.labels, (std::vector<std::string>{"u1", "u2"}));
  EXPECT_EQ(c.pulse_files[0], fs::path("/data/u1.json"));
  EXPECT_EQ(c.output, fs::path("/data/results"));
  EXPECT_EQ(c.mode, EvalMode::exact);

  const auto f = pipeline::parse_config("pulse_files = u.json\n", "/d");
  EXPECT_EQ(f.n_r, 100);
  EXPECT_EQ(f.sigma_grid.size(), 41u);
  EXPECT_DOUBLE_EQ(f.sigma_grid.front(), 0.1);
  EXPECT_DOUBLE_EQ(f.sigma_grid.back(), 0.5);

  EXPECT_THROW(pipeline::parse_config("pulse_files = u.json\nsigma_grid = 0.2, 0.1\n"), std::runtime_error);
  EXPECT_THROW(pipeline::parse_config("pulse_files = u.json\nn_r = 0\n"), std::runtime_error);
  EXPECT_THROW(pipeline::parse_config("pulse_files = u.json\nbogus = 1\n"), std::runtime_error);
  EXPECT_THROW(pipeline::parse_config("n_r = 3\n"), std::runtime_error);
}

TEST(pipeline, seeds_are_shared_and_distinct) {
  EXPECT_EQ(pipeline::realization_seed(1, 2, 3), pipeline::realization_seed(1, 2, 3));
  EXPECT_NE(pipeline::realization_seed(1, 2, 3), pipeline::realization_seed(1, 3, 2));
  EXPECT_NE(pipeline::realization_seed(1, 0, 0), pipeline::realization_seed(2, 0, 0));
}

TEST(pipeline, run_save_load_and_figures) {
  const auto dir = scratch("pipeline");
  const auto files = write_pulses(dir);
  auto cfg = pipeline::parse_config("pulse_files = a.json, b.json\nn_r = 3\nn = 16384\nsigma_grid = 0.1, 0.3\n"
                                    "mode = exact\nthreads = 2\n",
                                    dir);
  const auto r = pipeline::run_experiment(cfg);
  ASSERT_EQ(r.cells.size(), 4u);
  for (const auto& c : r.cells) {
    EXPECT_EQ(c.delta_alpha.size(), 3u);
    EXPECT_EQ(c.valid().size() + c.failures(), 3u);
  }
  // Shared noise: both pulse sets see the same seeds in a sigma column.
  EXPECT_EQ(r.find("a", 0.3)->seeds, r.find("b", 0.3)->seeds);
  EXPECT_NE(r.find("a", 0.1)->seeds, r.find("a", 0.3)->seeds);

  // Exact mode is bit-for-bit reproducible and independent of thread count.
  cfg.threads = 1;
  const auto again = pipeline::run_experiment(cfg);
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      const double x = r.cells[i].delta_alpha[k], y = again.cells[i].delta_alpha[k];
      EXPECT_TRUE(x == y || (std::isnan(x) && std::isnan(y)));
    }
  }

  pipeline::save_results(r, cfg.output);
  EXPECT_TRUE(fs::exists(cfg.output / "index.json"));
  const auto back = pipeline::load_results(cfg.output);
  ASSERT_EQ(back.cells.size(), r.cells.size());
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    const auto* c = back.find(r.cells[i].label, r.cells[i].sigma);
    ASSERT_NE(c, nullptr);
    const double m0 = r.cells[i].mean(), m1 = c->mean();
    EXPECT_TRUE(m0 == m1 || (std::isnan(m0) && std::isnan(m1)));
  }
  EXPECT_EQ(back.config.hash(), r.config.hash());

  const auto fig4 = pipeline::emit_figure_data(back, pipeline::Figure::fig4);
  EXPECT_NE(fig4.find("pulse_set,sigma,mean_dalpha,std_dalpha"), std::string::npos);
  const auto fig3 = pipeline::emit_figure_data(back, pipeline::Figure::fig3);
  EXPECT_NE(fig3.find("lower,upper,in_band"), std::string::npos);
  const auto fig1 = pipeline::emit_figure_data(back, pipeline::Figure::fig1, {0.0, 2.0, 0.5});
  EXPECT_NE(fig1.find("j_over_jbar,a,b"), std::string::npos);
  EXPECT_EQ(std::count(fig1.begin(), fig1.end(), '\n'), 2 + 5);

  // Missing cells are listed.
  fs::remove(cfg.output / "cells" / "b_s0.3000.csv");
  const auto partial = pipeline::load_results(cfg.output);
  try {
    pipeline::emit_figure_data(partial, pipeline::Figure::fig4);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("b@sigma=0.3"), std::string::npos);
  }
}

TEST(pipeline, statistics_recompute_from_values) {
  pipeline::CellResult c;
  c.delta_alpha = {1.0, 2.0, NAN, 3.0};
  EXPECT_EQ(c.failures(), 1u);
  EXPECT_DOUBLE_EQ(c.mean(), 2.0);
  EXPECT_DOUBLE_EQ(c.stddev(), 1.0);
}
