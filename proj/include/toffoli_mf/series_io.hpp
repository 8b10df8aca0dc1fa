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

// Real-valued series and the plain-text formats used to move them between
// CLI stages.
//
// Series CSV: optional comment lines starting with '#' carrying "key=value"
// metadata, one header line naming the column, then one value per line.
// Multi-column input is accepted; the last column is read.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace toffoli_mf {

struct SeriesMeta {
  std::string kind;
  std::uint64_t seed = 0;
  double sigma = 0.0;
};

struct SeriesR {
  std::vector<double> values;
  SeriesMeta meta;

  std::size_t size() const { return values.size(); }
};

void write_series_csv(const std::filesystem::path& path, const SeriesR& series,
                      const std::string& column = "value");
SeriesR read_series_csv(const std::filesystem::path& path);

// Writes `contents` to a sibling temporary file and renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_text(const std::filesystem::path& path);

// Plain key/value configuration: "key = value" lines, '#' starts a comment,
// blank lines ignored. Later keys override earlier ones.
std::map<std::string, std::string> parse_key_values(const std::string& text);

}  // namespace toffoli_mf
