// Copyright 2026 The gbatlas Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gba/fusion.hpp"

namespace gba::io {

/// Comma-separated table with a header row. Fields may be double-quoted;
/// quotes inside quoted fields are doubled.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index; IoError if absent.
  [[nodiscard]] std::size_t column(std::string_view name) const;
  [[nodiscard]] std::optional<std::size_t> find_column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text, const std::string& origin = "<memory>");
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
std::string csv_escape(std::string_view field);

/// Parses a number; IoError naming `origin` on failure.
double parse_number(std::string_view text, const std::string& origin);

/// Two-column table keyed by continent code (AS, AF, EU, NA, SA, OC).
std::map<Continent, double> read_continent_values(const std::filesystem::path& path,
                                                  std::string_view value_column);

/// Region table (region_id, year, <value_column>). Takes the given year,
/// or the latest year per region when none is given.
std::map<std::string, double> read_region_values(const std::filesystem::path& path,
                                                 std::string_view value_column,
                                                 std::optional<int> year = std::nullopt);

struct SceneRow {
  std::string scene_id;
  double cloud_fraction = 0.0;
  int year = 0;
  int doy = 0;
  std::filesystem::path path;
  std::filesystem::path mask_path;
};

/// Scene sidecar: scene_id, cloud_fraction, year, path, mask_path and an
/// optional doy column. Relative paths resolve against the table's folder.
std::vector<SceneRow> read_scene_table(const std::filesystem::path& path);

}  // namespace gba::io
