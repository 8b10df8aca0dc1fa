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


#include "toffoli_mf/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "toffoli_mf/parallel.hpp"
#include "toffoli_mf/pulse_opt.hpp"
#include "toffoli_mf/series_io.hpp"

namespace toffoli_mf::pipeline {
namespace fs = std::filesystem;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n\"'");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n\"'");
  return s.substr(b, e - b + 1);
}

// "a, b, c" or "[a, b, c]" with optional quotes.
std::vector<std::string> split_list(std::string s) {
  s = trim(s);
  if (!s.empty() && s.front() == '[') s.erase(0, 1);
  if (!s.empty() && s.back() == ']') s.pop_back();
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw std::runtime_error("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::runtime_error("config key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<double> sigma_range(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw std::runtime_error("bad sigma range");
  const auto count = static_cast<long>(std::llround((hi - lo) / step));
  std::vector<double> out;
  for (long i = 0; i <= count; ++i) {
    // Round to 1e-12 so grid values print and compare cleanly.
    out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
  }
  return out;
}

std::string mode_name(EvalMode m) { return m == EvalMode::exact ? "exact" : "interpolated"; }

EvalMode parse_mode(const std::string& s) {
  if (s == "exact") return EvalMode::exact;
  if (s == "interpolated") return EvalMode::interpolated;
  throw std::runtime_error("unknown evaluation mode '" + s + "' (exact | interpolated)");
}

std::string cell_file(const std::string& label, double sigma) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "_s%.4f.csv", sigma);
  std::string safe = label;
  for (char& c : safe)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  return safe + buf;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

bool same_sigma(double a, double b) { return std::abs(a - b) <= 1e-9; }

}  // namespace

std::vector<double> ExperimentConfig::default_sigma_grid() { return sigma_range(0.10, 0.50, 0.01); }

ExperimentConfig ExperimentConfig::desk() {
  ExperimentConfig c;
  c.n_r = 20;
  c.n = 32768;
  c.sigma_grid = {0.1, 0.2, 0.3, 0.5};
  return c;
}

ExperimentConfig ExperimentConfig::full() { return ExperimentConfig{}; }

void ExperimentConfig::validate() const {
  if (pulse_files.empty()) throw std::runtime_error("config: no pulse_files given");
  if (labels.size() != pulse_files.size())
    throw std::runtime_error("config: labels and pulse_files differ in length");
  if (std::set<std::string>(labels.begin(), labels.end()).size() != labels.size())
    throw std::runtime_error("config: labels must be unique");
  if (n_r < 1) throw std::runtime_error("config: n_r must be >= 1");
  if (n < 1024) throw std::runtime_error("config: n must be >= 1024");
  if (noise == noise::NoiseKind::pink && !noise::is_power_of_two(n))
    throw std::runtime_error("config: pink noise needs n to be a power of two");
  if (sigma_grid.empty()) throw std::runtime_error("config: empty sigma grid");
  for (std::size_t i = 0; i < sigma_grid.size(); ++i) {
    if (!(sigma_grid[i] > 0.0)) throw std::runtime_error("config: sigma values must be positive");
    if (i > 0 && !(sigma_grid[i] > sigma_grid[i - 1]))
      throw std::runtime_error("config: sigma grid must be strictly ascending");
  }
  if (!(jbar > 0.0)) throw std::runtime_error("config: jbar must be positive");
}

nlohmann::json ExperimentConfig::to_json() const {
  std::vector<std::string> files;
  for (const auto& f : pulse_files) files.push_back(f.string());
  return {{"pulse_files", files},
          {"labels", labels},
          {"noise", std::string(noise::kind_name(noise))},
          {"n_r", n_r},
          {"n", n},
          {"sigma_grid", sigma_grid},
          {"seed", seed},
          {"mode", mode_name(mode)},
          {"output", output.string()},
          {"jbar", jbar},
          {"damf",
           {{"qmin", damf.qmin},
            {"qmax", damf.qmax},
            {"qstep", damf.qstep},
            {"kmin", damf.kmin},
            {"kmax", damf.kmax},
            {"integrate", damf.integrate}}}};
}

std::string ExperimentConfig::hash() const {
  // Everything that determines the numbers; not where they are written.
  auto j = to_json();
  j.erase("output");
  j.erase("pulse_files");
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(const std::string& text, const fs::path& base_dir) {
  auto kv = parse_key_values(text);
  ExperimentConfig c;
  if (auto it = kv.find("profile"); it != kv.end()) {
    if (it->second == "desk") c = ExperimentConfig::desk();
    else if (it->second == "full") c = ExperimentConfig::full();
    else throw std::runtime_error("config: unknown profile '" + it->second + "' (desk | full)");
    kv.erase(it);
  }
  std::optional<double> smin, smax, sstep;
  for (const auto& [key, value] : kv) {
    if (key == "pulse_files") {
      c.pulse_files.clear();
      for (const auto& f : split_list(value)) {
        fs::path p(f);
        c.pulse_files.push_back(p.is_absolute() ? p : base_dir / p);
      }
    } else if (key == "labels") c.labels = split_list(value);
    else if (key == "noise") c.noise = noise::parse_kind(value);
    else if (key == "n_r") c.n_r = static_cast<int>(parse_int(key, value));
    else if (key == "n") c.n = static_cast<std::size_t>(parse_int(key, value));
    else if (key == "sigma_grid") {
      c.sigma_grid.clear();
      for (const auto& s : split_list(value)) c.sigma_grid.push_back(parse_double(key, s));
    } else if (key == "sigma_min") smin = parse_double(key, value);
    else if (key == "sigma_max") smax = parse_double(key, value);
    else if (key == "sigma_step") sstep = parse_double(key, value);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "mode") c.mode = parse_mode(value);
    else if (key == "output") {
      fs::path p(value);
      c.output = p.is_absolute() ? p : base_dir / p;
    } else if (key == "threads") c.threads = static_cast<unsigned>(parse_int(key, value));
    else if (key == "jbar") c.jbar = parse_double(key, value);
    else if (key == "qmin") c.damf.qmin = parse_double(key, value);
    else if (key == "qmax") c.damf.qmax = parse_double(key, value);
    else if (key == "qstep") c.damf.qstep = parse_double(key, value);
    else if (key == "kmin") c.damf.kmin = static_cast<int>(parse_int(key, value));
    else if (key == "kmax") c.damf.kmax = static_cast<int>(parse_int(key, value));
    else if (key == "integrate") c.damf.integrate = parse_bool(key, value);
    else throw std::runtime_error("config: unknown key '" + key + "'");
  }
  if (smin || smax || sstep) {
    if (!(smin && smax && sstep))
      throw std::runtime_error("config: sigma_min, sigma_max and sigma_step go together");
    c.sigma_grid = sigma_range(*smin, *smax, *sstep);
  }
  if (c.labels.empty())
    for (const auto& f : c.pulse_files) c.labels.push_back(f.stem().string());
  if (!kv.contains("output")) c.output = base_dir / c.output;
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  return parse_config(read_text(path), path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

std::uint64_t realization_seed(std::uint64_t base, std::size_t sigma_index, std::size_t realization) {
  return derive_seed(base, sigma_index, realization);
}

std::vector<double> CellResult::valid() const {
  std::vector<double> v;
  for (double x : delta_alpha)
    if (std::isfinite(x)) v.push_back(x);
  return v;
}

std::size_t CellResult::failures() const { return delta_alpha.size() - valid().size(); }

double CellResult::mean() const {
  const auto v = valid();
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double CellResult::stddev() const {
  const auto v = valid();
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean();
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

const CellResult* EnsembleResult::find(const std::string& label, double sigma) const {
  for (const auto& c : cells)
    if (c.label == label && same_sigma(c.sigma, sigma)) return &c;
  return nullptr;
}

EnsembleResult run_experiment(const ExperimentConfig& config,
                              const std::function<void(std::size_t, std::size_t)>& progress) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  EnsembleResult result;
  result.config = config;
  quantum::CouplingConfig coupling;
  coupling.jbar = config.jbar;

  for (const auto& f : config.pulse_files) result.pulse_sets.push_back(load_pulse_document(f));
  const std::size_t np = result.pulse_sets.size();
  const std::size_t ns = config.sigma_grid.size();
  const auto nr = static_cast<std::size_t>(config.n_r);

  std::vector<std::unique_ptr<FidelityTable>> tables(np);
  if (config.mode == EvalMode::interpolated) {
    for (std::size_t p = 0; p < np; ++p) {
      FidelityTableOptions opt;
      opt.threads = config.threads;
      tables[p] = std::make_unique<FidelityTable>(result.pulse_sets[p].pulses, coupling, opt);
      if (!(tables[p]->certified_error() <= 1e-6))
        throw std::runtime_error("fidelity table for '" + config.labels[p] +
                                 "' failed certification: max error " +
                                 fmt(tables[p]->certified_error()) + " > 1e-6; use mode = exact");
    }
  }

  result.cells.resize(np * ns);
  for (std::size_t p = 0; p < np; ++p)
    for (std::size_t s = 0; s < ns; ++s) {
      auto& cell = result.cells[p * ns + s];
      cell.label = config.labels[p];
      cell.sigma = config.sigma_grid[s];
      cell.sigma_index = s;
      cell.seeds.resize(nr);
      cell.delta_alpha.assign(nr, std::numeric_limits<double>::quiet_NaN());
      cell.status.assign(nr, "pending");
    }

  std::atomic<std::size_t> done{0};
  const std::size_t total = ns * nr;
  parallel_for(total, config.threads, [&](std::size_t task) {
    const std::size_t s = task / nr;
    const std::size_t r = task % nr;
    const std::uint64_t seed = realization_seed(config.seed, s, r);
    const auto eps = noise::generate(config.noise, config.n, config.sigma_grid[s], seed);
    const auto j = noise::coupling_series(eps, config.jbar);
    std::vector<double> f(j.size());
    for (std::size_t p = 0; p < np; ++p) {
      auto& cell = result.cells[p * ns + s];
      cell.seeds[r] = seed;
      try {
        if (tables[p]) tables[p]->evaluate(j.values, f);
        else f = fidelity_series(result.pulse_sets[p].pulses, coupling, j.values, EvalMode::exact, 1);
        const auto a = damf::analyze(f, config.damf);
        cell.delta_alpha[r] = a.spectrum.width;
        cell.status[r] = "ok";
      } catch (const std::exception& e) {
        cell.status[r] = e.what();
      }
    }
    const std::size_t d = done.fetch_add(1) + 1;
    if (progress) progress(d, total);
  });

  result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void save_results(const EnsembleResult& result, const fs::path& dir) {
  fs::create_directories(dir / "cells");
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : result.cells) {
    const std::string file = "cells/" + cell_file(c.label, c.sigma);
    std::ostringstream csv;
    csv << "# pulse_set=" << c.label << "\n# sigma=" << fmt(c.sigma) << "\n";
    csv << "realization,seed,delta_alpha,status\n";
    for (std::size_t r = 0; r < c.delta_alpha.size(); ++r) {
      std::string status = c.status[r];
      std::replace(status.begin(), status.end(), ',', ';');
      std::replace(status.begin(), status.end(), '\n', ' ');
      csv << r << ',' << c.seeds[r] << ',' << fmt(c.delta_alpha[r]) << ',' << status << '\n';
    }
    write_text_atomic(dir / file, csv.str());
    const double m = c.mean(), sd = c.stddev();
    cells.push_back({{"pulse_set", c.label},
                     {"sigma", c.sigma},
                     {"sigma_index", c.sigma_index},
                     {"file", file},
                     {"n_ok", c.valid().size()},
                     {"n_failed", c.failures()},
                     {"mean_dalpha", std::isfinite(m) ? nlohmann::json(m) : nlohmann::json()},
                     {"std_dalpha", std::isfinite(sd) ? nlohmann::json(sd) : nlohmann::json()}});
  }
  nlohmann::json pulses = nlohmann::json::array();
  for (std::size_t p = 0; p < result.pulse_sets.size(); ++p)
    pulses.push_back({{"label", result.config.labels[p]}, {"document", to_json(result.pulse_sets[p])}});
  const nlohmann::json index = {{"schema", 1},
                                {"config", result.config.to_json()},
                                {"config_hash", result.config.hash()},
                                {"pulse_sets", pulses},
                                {"cells", cells},
                                {"wall_time", result.wall_time}};
  write_text_atomic(dir / "index.json", index.dump(2) + "\n");
}

EnsembleResult load_results(const fs::path& dir) {
  const auto index = nlohmann::json::parse(read_text(dir / "index.json"));
  if (index.value("schema", 0) != 1) throw std::runtime_error("unsupported results schema");
  EnsembleResult r;
  const auto& cj = index.at("config");
  auto& c = r.config;
  c.pulse_files.clear();
  for (const auto& f : cj.at("pulse_files")) c.pulse_files.emplace_back(f.get<std::string>());
  c.labels = cj.at("labels").get<std::vector<std::string>>();
  c.noise = noise::parse_kind(cj.at("noise").get<std::string>());
  c.n_r = cj.at("n_r").get<int>();
  c.n = cj.at("n").get<std::size_t>();
  c.sigma_grid = cj.at("sigma_grid").get<std::vector<double>>();
  c.seed = cj.at("seed").get<std::uint64_t>();
  c.mode = parse_mode(cj.at("mode").get<std::string>());
  c.output = cj.at("output").get<std::string>();
  c.jbar = cj.at("jbar").get<double>();
  const auto& d = cj.at("damf");
  c.damf.qmin = d.at("qmin").get<double>();
  c.damf.qmax = d.at("qmax").get<double>();
  c.damf.qstep = d.at("qstep").get<double>();
  c.damf.kmin = d.at("kmin").get<int>();
  c.damf.kmax = d.at("kmax").get<int>();
  c.damf.integrate = d.at("integrate").get<bool>();
  for (const auto& p : index.at("pulse_sets")) r.pulse_sets.push_back(pulse_document_from_json(p.at("document")));
  r.wall_time = index.value("wall_time", 0.0);

  for (const auto& cell : index.at("cells")) {
    CellResult cr;
    cr.label = cell.at("pulse_set").get<std::string>();
    cr.sigma = cell.at("sigma").get<double>();
    cr.sigma_index = cell.at("sigma_index").get<std::size_t>();
    const fs::path file = dir / cell.at("file").get<std::string>();
    if (!fs::exists(file)) continue;  // reported as missing by emit_figure_data
    std::istringstream in(read_text(file));
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
      if (line.empty() || line.front() == '#') continue;
      if (!header) {
        header = true;
        continue;
      }
      std::stringstream row(line);
      std::string idx, seed, value, status;
      std::getline(row, idx, ',');
      std::getline(row, seed, ',');
      std::getline(row, value, ',');
      std::getline(row, status);
      cr.seeds.push_back(std::stoull(seed));
      cr.delta_alpha.push_back(value == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(value));
      cr.status.push_back(status);
    }
    r.cells.push_back(std::move(cr));
  }
  return r;
}

Figure parse_figure(const std::string& name) {
  if (name == "fig1") return Figure::fig1;
  if (name == "fig3") return Figure::fig3;
  if (name == "fig4") return Figure::fig4;
  throw std::runtime_error("unknown figure '" + name + "' (fig1 | fig3 | fig4)");
}

std::string emit_figure_data(const EnsembleResult& result, Figure figure, const Fig1Grid& grid) {
  const auto& cfg = result.config;
  std::ostringstream out;
  if (figure == Figure::fig1) {
    if (result.pulse_sets.size() != cfg.labels.size() || result.pulse_sets.empty())
      throw std::runtime_error("fig1: results hold no pulse sets");
    if (!(grid.step > 0.0) || !(grid.hi > grid.lo)) throw std::runtime_error("fig1: bad J grid");
    std::vector<double> jr, j;
    const auto count = static_cast<long>(std::llround((grid.hi - grid.lo) / grid.step));
    for (long i = 0; i <= count; ++i) {
      jr.push_back(grid.lo + static_cast<double>(i) * grid.step);
      j.push_back(jr.back() * cfg.jbar);
    }
    quantum::CouplingConfig coupling;
    coupling.jbar = cfg.jbar;
    std::vector<std::vector<double>> curves;
    for (const auto& doc : result.pulse_sets)
      curves.push_back(pulse_opt::fidelity_sweep(doc.pulses, coupling, j));
    out << "# fidelity versus J/jbar; one column per pulse set\n";
    out << "j_over_jbar";
    for (const auto& l : cfg.labels) out << ',' << l;
    out << '\n';
    for (std::size_t i = 0; i < jr.size(); ++i) {
      out << fmt(jr[i]);
      for (const auto& c : curves) out << ',' << fmt(c[i]);
      out << '\n';
    }
    return out.str();
  }

  std::vector<std::string> missing;
  std::vector<const CellResult*> cells;
  for (const auto& label : cfg.labels)
    for (double sigma : cfg.sigma_grid) {
      const auto* c = result.find(label, sigma);
      if (c == nullptr || c->valid().empty()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", sigma);
        missing.push_back(label + "@sigma=" + buf);
        continue;
      }
      cells.push_back(c);
    }
  if (!missing.empty()) {
    std::string msg = "missing or empty cells:";
    for (const auto& m : missing) msg += " " + m;
    throw std::runtime_error(msg);
  }

  if (figure == Figure::fig4) {
    out << "# mean and sample standard deviation of the multifractal width per cell\n";
    out << "pulse_set,sigma,mean_dalpha,std_dalpha,n_ok,n_failed\n";
    for (const auto* c : cells)
      out << c->label << ',' << fmt(c->sigma) << ',' << fmt(c->mean()) << ',' << fmt(c->stddev()) << ','
          << c->valid().size() << ',' << c->failures() << '\n';
    return out.str();
  }

  out << "# one row per realization; lower/upper bound the mean +- 1 std band\n";
  out << "pulse_set,sigma,realization,delta_alpha,mean_dalpha,std_dalpha,lower,upper,in_band\n";
  for (const auto* c : cells) {
    const double m = c->mean(), sd = c->stddev();
    for (std::size_t r = 0; r < c->delta_alpha.size(); ++r) {
      const double x = c->delta_alpha[r];
      if (!std::isfinite(x)) continue;
      const bool in = std::abs(x - m) <= sd;
      out << c->label << ',' << fmt(c->sigma) << ',' << r << ',' << fmt(x) << ',' << fmt(m) << ','
          << fmt(sd) << ',' << fmt(m - sd) << ',' << fmt(m + sd) << ',' << (in ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

}  // namespace toffoli_mf::pipeline
