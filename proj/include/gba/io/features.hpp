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

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gba/fusion.hpp"
#include "gba/geometry.hpp"
#include "gba/lod1.hpp"

namespace gba::io {

struct Rejection {
  std::size_t ordinal = 0;  // 1-based feature position in the file
  std::string id;
  std::string reason;
};

struct FeatureReadReport {
  std::string path;
  std::size_t accepted = 0;
  std::size_t repaired = 0;  // subset of accepted
  std::vector<std::string> repaired_ids;
  std::vector<Rejection> rejected;
};

/// Streams features from a newline-delimited file (one feature object per
/// line) or from a single FeatureCollection document. Geometries are
/// repaired when possible; malformed features are skipped and recorded.
/// `source` overrides the per-feature "source" property when given.
class FeatureReader {
 public:
  explicit FeatureReader(const std::filesystem::path& path,
                         std::optional<Source> source = std::nullopt);
  ~FeatureReader();
  FeatureReader(FeatureReader&&) noexcept;
  FeatureReader& operator=(FeatureReader&&) noexcept;

  /// Next valid record, or nullopt at end of input.
  std::optional<Lod1Record> next();
  [[nodiscard]] const FeatureReadReport& report() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Reads a whole file; the height of each record is copied into
/// FootprintRecord::height_m. Throws IoError if the file cannot be read.
std::vector<FootprintRecord> read_footprints(const std::filesystem::path& path,
                                             std::optional<Source> source = std::nullopt,
                                             FeatureReadReport* report = nullptr);
std::vector<Lod1Record> read_lod1(const std::filesystem::path& path,
                                  FeatureReadReport* report = nullptr);

/// Admin boundaries: Polygon or MultiPolygon features with "admin_id" and
/// "continent" properties.
std::vector<AdminUnit> read_admin_units(const std::filesystem::path& path);

using Properties = std::vector<std::pair<std::string, std::string>>;

/// One line of the feature format (no trailing newline).
std::string feature_line(const FootprintRecord& r, const Properties& extra = {});
std::string feature_line(const Lod1Record& r);

/// Writes records sorted by id, one feature per line. `extra` string
/// properties are added to every feature.
void write_footprints(const std::filesystem::path& path, std::vector<FootprintRecord> records,
                      const Properties& extra = {});
void write_lod1(const std::filesystem::path& path, std::vector<Lod1Record> records);

/// Flat table: id,height_m,variance_m2,volume_m3 (missing values empty).
void write_lod1_table(const std::filesystem::path& path, std::vector<Lod1Record> records);

/// Opens a file for writing, creating parent directories. IoError on
/// failure.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace gba::io
