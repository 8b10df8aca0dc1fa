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

// Pulse-set file format, schema version 1:
//
//   {
//     "schema": 1,
//     "nt": 20,
//     "tg": 4.18,
//     "layout": "x-only",              // full | x-only | symmetric13
//     "amplitudes": [ ... ],           // row-major nt x n_controls
//     "meta": {
//       "objective": "plain",          // plain | interval | flatten
//       "beta": 0.0,
//       "seed": 1,
//       "fidelity_at_jbar": 0.995
//     }
//   }

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "toffoli_mf/quantum.hpp"

namespace toffoli_mf {

inline constexpr int kPulseSchemaVersion = 1;

struct PulseMeta {
  std::string objective = "plain";
  double beta = 0.0;
  std::uint64_t seed = 0;
  double fidelity_at_jbar = 0.0;
};

struct PulseDocument {
  quantum::PulseSet pulses;
  PulseMeta meta;
};

nlohmann::json to_json(const PulseDocument& doc);
PulseDocument pulse_document_from_json(const nlohmann::json& j);

void save_pulse_document(const std::filesystem::path& path, const PulseDocument& doc);
PulseDocument load_pulse_document(const std::filesystem::path& path);

}  // namespace toffoli_mf
