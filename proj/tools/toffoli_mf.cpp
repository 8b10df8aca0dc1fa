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


// toffoli-mf: pulse synthesis, noise generation, EMD, multifractal analysis
// and experiment orchestration from the command line.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "toffoli_mf/damf.hpp"
#include "toffoli_mf/emd.hpp"
#include "toffoli_mf/noise.hpp"
#include "toffoli_mf/pipeline.hpp"
#include "toffoli_mf/pulse_io.hpp"
#include "toffoli_mf/pulse_opt.hpp"
#include "toffoli_mf/series_io.hpp"
#include "toffoli_mf/simd.hpp"

namespace fs = std::filesystem;
using namespace toffoli_mf;

namespace {

fs::path report_path(const fs::path& pulses) {
  fs::path p = pulses;
  p.replace_extension();
  return p.string() + ".report.json";
}

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int run_optimize(const std::string& kind, double beta, double j0, int restarts, std::uint64_t seed,
                 const std::string& layout, int nt, double tg, unsigned threads, const fs::path& out) {
  pulse_opt::ObjectiveSpec spec;
  spec.kind = pulse_opt::parse_kind(kind);
  spec.beta = beta;
  spec.j0 = j0;
  spec.validate();
  pulse_opt::OptimizeOptions opt;
  opt.restarts = restarts;
  opt.seed = seed;
  opt.layout = quantum::parse_layout(layout);
  opt.nt = nt;
  opt.tg = tg;
  opt.threads = threads;
  const auto report = pulse_opt::optimize(spec, opt);

  PulseDocument doc{report.best, {}};
  doc.meta.objective = std::string(pulse_opt::kind_name(spec.kind));
  doc.meta.beta = spec.kind == pulse_opt::ObjectiveKind::flatten ? beta : 0.0;
  doc.meta.seed = report.trace.at(report.best_restart).seed;
  doc.meta.fidelity_at_jbar = report.fidelity_at_jbar;
  save_pulse_document(out, doc);
  write_text_atomic(report_path(out), pulse_opt::report_to_json(report).dump(2) + "\n");
  std::cerr << "objective " << report.objective_value << "  F(jbar) " << report.fidelity_at_jbar
            << "  best restart " << report.best_restart << "/" << report.restarts << "  "
            << report.wall_time << " s\n";
  return 0;
}

int run_noise(const std::string& kind, std::size_t n, double sigma, std::uint64_t seed, const fs::path& out) {
  const auto s = noise::generate(noise::parse_kind(kind), n, sigma, seed);
  write_series_csv(out, s, "eps");
  return 0;
}

int run_emd(const fs::path& in, const fs::path& out, bool integrate) {
  const auto series = read_series_csv(in);
  const auto x = integrate ? emd::integrated_path(series.values) : series.values;
  const auto imfs = emd::sift(x);
  const std::size_t k = imfs.size();
  std::ostringstream csv;
  csv << "# imfs=" << k << "\n# timescales=";
  for (std::size_t i = 0; i < k; ++i) csv << (i ? ";" : "") << g17(imfs.timescales[i]);
  csv << "\nt";
  for (std::size_t i = 1; i <= k; ++i) csv << ",c_" << i;
  csv << ",r";
  for (std::size_t i = 1; i <= k; ++i) csv << ",a_" << i;
  csv << '\n';
  for (std::size_t t = 0; t < x.size(); ++t) {
    csv << t;
    for (std::size_t i = 0; i < k; ++i) csv << ',' << g17(imfs.imfs[i][t]);
    csv << ',' << g17(imfs.residual[t]);
    for (std::size_t i = 0; i < k; ++i) csv << ',' << g17(imfs.envelopes[i][t]);
    csv << '\n';
  }
  write_text_atomic(out, csv.str());
  std::cerr << k << " IMFs\n";
  return 0;
}

int run_mf(const fs::path& in, const damf::DamfConfig& cfg, const fs::path& out) {
  const auto series = read_series_csv(in);
  const auto a = damf::analyze(series.values, cfg);
  write_text_atomic(out, damf::to_json(a).dump(2) + "\n");
  for (const auto& w : a.fit.warnings) std::cerr << "warning: " << w << '\n';
  std::cerr << "delta_alpha " << a.spectrum.width << '\n';
  return 0;
}

int run_experiment(const fs::path& config_path, bool quiet) {
  const auto cfg = pipeline::load_config(config_path);
  std::cerr << "experiment " << cfg.hash() << ": " << cfg.labels.size() << " pulse sets, "
            << cfg.sigma_grid.size() << " sigma values, n_r " << cfg.n_r << '\n';
  std::mutex m;
  std::size_t last = 0;
  auto progress = [&](std::size_t done, std::size_t total) {
    if (quiet) return;
    std::lock_guard lock(m);
    const std::size_t pct = 100 * done / total;
    if (pct / 5 != last / 5 || done == total) {
      last = pct;
      std::cerr << "  " << done << "/" << total << " cells (" << pct << "%)\n";
    }
  };
  const auto result = pipeline::run_experiment(cfg, progress);
  pipeline::save_results(result, cfg.output);
  std::size_t failed = 0;
  for (const auto& c : result.cells) failed += c.failures();
  std::cerr << "wrote " << (cfg.output / "index.json").string() << " (" << failed
            << " failed analyses, " << result.wall_time << " s)\n";
  return 0;
}

int run_figure(const std::string& which, const fs::path& in, const fs::path& out,
               const pipeline::Fig1Grid& grid) {
  const auto result = pipeline::load_results(in);
  write_text_atomic(out, pipeline::emit_figure_data(result, pipeline::parse_figure(which), grid));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust Toffoli pulses and multifractal analysis of their fidelity under 1/f noise"};
  app.require_subcommand(1);

  auto* opt = app.add_subcommand("optimize", "Synthesize a pulse set");
  std::string kind = "plain", layout = "full";
  double beta = 0.1, j0 = 0.1, tg = 4.18;
  int restarts = 200, nt = 20;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  fs::path out;
  opt->add_option("--kind", kind, "plain | interval | flatten")->check(CLI::IsMember({"plain", "interval", "flatten"}));
  opt->add_option("--beta", beta, "flatten weight");
  opt->add_option("--j0", j0, "flatten offset in units of jbar");
  opt->add_option("--restarts", restarts)->check(CLI::PositiveNumber);
  opt->add_option("--seed", seed);
  opt->add_option("--layout", layout, "full | x-only | symmetric13");
  opt->add_option("--nt", nt)->check(CLI::PositiveNumber);
  opt->add_option("--tg", tg)->check(CLI::PositiveNumber);
  opt->add_option("--threads", threads, "0 = all hardware threads");
  opt->add_option("--out", out)->required();

  auto* nz = app.add_subcommand("noise", "Generate a noise sequence");
  std::string noise_kind = "pink";
  std::size_t n = 32768;
  double sigma = 0.1;
  std::uint64_t noise_seed = 1;
  fs::path noise_out;
  nz->add_option("--kind", noise_kind)->check(CLI::IsMember({"pink", "white"}));
  nz->add_option("--n", n)->check(CLI::PositiveNumber);
  nz->add_option("--sigma", sigma)->check(CLI::PositiveNumber);
  nz->add_option("--seed", noise_seed);
  nz->add_option("--out", noise_out)->required();

  auto* em = app.add_subcommand("emd", "Empirical mode decomposition of a series");
  fs::path emd_in, emd_out;
  bool emd_integrate = false;
  em->add_option("--in", emd_in)->required()->check(CLI::ExistingFile);
  em->add_option("--out", emd_out)->required();
  em->add_flag("--integrate", emd_integrate, "decompose the integrated path instead");

  auto* mf = app.add_subcommand("mf", "Singularity spectrum of a series");
  fs::path mf_in, mf_out;
  damf::DamfConfig dcfg;
  bool no_integrate = false;
  mf->add_option("--in", mf_in)->required()->check(CLI::ExistingFile);
  mf->add_option("--qmin", dcfg.qmin);
  mf->add_option("--qmax", dcfg.qmax);
  mf->add_option("--qstep", dcfg.qstep)->check(CLI::PositiveNumber);
  mf->add_option("--kmin", dcfg.kmin)->check(CLI::PositiveNumber);
  mf->add_option("--kmax", dcfg.kmax)->check(CLI::PositiveNumber);
  mf->add_flag("--no-integrate", no_integrate, "analyze the series itself, not its integrated path");
  mf->add_option("--out", mf_out)->required();

  auto* ex = app.add_subcommand("experiment", "Run a noise-ensemble experiment");
  fs::path config;
  bool quiet = false;
  ex->add_option("--config", config)->required()->check(CLI::ExistingFile);
  ex->add_flag("--quiet", quiet);

  auto* fg = app.add_subcommand("figure", "Emit plot data from experiment results");
  std::string which;
  fs::path fig_in, fig_out;
  pipeline::Fig1Grid grid;
  fg->add_option("--which", which)->required()->check(CLI::IsMember({"fig1", "fig3", "fig4"}));
  fg->add_option("--in", fig_in)->required()->check(CLI::ExistingDirectory);
  fg->add_option("--out", fig_out)->required();
  fg->add_option("--jmin", grid.lo, "fig1 grid start, J/jbar");
  fg->add_option("--jmax", grid.hi, "fig1 grid end, J/jbar");
  fg->add_option("--jstep", grid.step, "fig1 grid step");

  app.add_subcommand("info", "Show the active SIMD kernel set");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*opt) return run_optimize(kind, beta, j0, restarts, seed, layout, nt, tg, threads, out);
    if (*nz) return run_noise(noise_kind, n, sigma, noise_seed, noise_out);
    if (*em) return run_emd(emd_in, emd_out, emd_integrate);
    if (*mf) {
      dcfg.integrate = !no_integrate;
      return run_mf(mf_in, dcfg, mf_out);
    }
    if (*ex) return run_experiment(config, quiet);
    if (*fg) return run_figure(which, fig_in, fig_out, grid);
    std::cout << "simd: " << simd::isa_name(simd::active_isa()) << '\n';
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
