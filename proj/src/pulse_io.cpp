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

#include "toffoli_mf/pulse_io.hpp"

#include <stdexcept>

#include "toffoli_mf/series_io.hpp"

namespace toffoli_mf {

nlohmann::json to_json(const PulseDocument& doc) {
  const auto& p = doc.pulses;
  nlohmann::json j;
  j["schema"] = kPulseSchemaVersion;
  j["nt"] = p.nt();
  j["tg"] = p.tg();
  j["layout"] = std::string(quantum::layout_name(p.layout()));
  j["amplitudes"] = std::vector<double>(p.amplitudes().begin(), p.amplitudes().end());
  j["meta"] = {{"objective", doc.meta.objective},
               {"beta", doc.meta.beta},
               {"seed", doc.meta.seed},
               {"fidelity_at_jbar", doc.meta.fidelity_at_jbar}};
  return j;
}

PulseDocument pulse_document_from_json(const nlohmann::json& j) {
  const int schema = j.value("schema", 0);
  if (schema != kPulseSchemaVersion)
    throw std::runtime_error("unsupported pulse schema version " + std::to_string(schema));
  quantum::PulseSet pulses(j.at("nt").get<int>(), j.at("tg").get<double>(),
                           quantum::parse_layout(j.at("layout").get<std::string>()),
                           j.at("amplitudes").get<std::vector<double>>());
  PulseMeta meta;
  if (j.contains("meta")) {
    const auto& m = j.at("meta");
    meta.objective = m.value("objective", meta.objective);
    meta.beta = m.value("beta", meta.beta);
    meta.seed = m.value("seed", meta.seed);
    meta.fidelity_at_jbar = m.value("fidelity_at_jbar", meta.fidelity_at_jbar);
  }
  return {std::move(pulses), meta};
}

void save_pulse_document(const std::filesystem::path& path, const PulseDocument& doc) {
  write_text_atomic(path, to_json(doc).dump(2) + "\n");
}

PulseDocument load_pulse_document(const std::filesystem::path& path) {
  try {
    return pulse_document_from_json(nlohmann::json::parse(read_text(path)));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace toffoli_mf
