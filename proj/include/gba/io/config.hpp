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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gba/geometry.hpp"
#include "gba/metrics.hpp"
#include "gba/polygonize.hpp"
#include "gba/raster.hpp"
#include "gba/tiling.hpp"

namespace gba::io {

/// Settings for one pipeline run. Relative paths are resolved against the
/// folder of the config file. Empty paths mean "not provided".
struct PipelineConfig {
  // [general]
  std::string city = "city";
  std::optional<TileId> tile;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";

  // [mosaic]
  std::filesystem::path scenes;
  std::optional<GridSpec> grid;
  SceneFilterOptions scene_filter;

  // [polygonize]
  std::filesystem::path probability;
  std::filesystem::path builtup;
  PolygonizeOptions polygonize;

  // [fusion]
  std::filesystem::path admin_units;
  std::map<Source, std::filesystem::path> footprints;
  bool include_psr = true;
  double overlap_threshold = 0.1;

  // [lod1]
  std::vector<std::filesystem::path> height_layers;
  double min_height_m = kMinValidHeightM;

  // [eval]
  std::filesystem::path reference;
  EvalOptions eval;

  // [analyze]
  double volume_cell_m = 480.0;
  std::filesystem::path population;

  /// Range checks on every threshold; with check_paths, every non-empty
  /// path must exist. Throws ValidationError.
  void validate(bool check_paths = true) const;
};

/// INI-style "key = value" text with [section] headers; '#' and ';' start
/// comment lines and values may be double-quoted. Unknown sections or keys
/// are rejected.
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

/// "origin_x, origin_y, pixel_w, pixel_h, width, height".
GridSpec parse_grid(std::string_view text, Crs crs);

}  // namespace gba::io
