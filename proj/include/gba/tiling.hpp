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

#include <functional>
#include <string>
#include <vector>

#include "gba/geometry.hpp"
#include "gba/raster.hpp"

namespace gba {

inline constexpr double kTileSizeDeg = 0.2;
inline constexpr int kTileMinX = -900;
inline constexpr int kTileMaxX = 900;  // exclusive
inline constexpr int kTileMinY = -450;
inline constexpr int kTileMaxY = 450;  // exclusive

/// Cell of the global 0.2 degree grid.
struct TileId {
  int ix = 0;
  int iy = 0;

  friend auto operator<=>(const TileId&, const TileId&) = default;

  /// "ix_iy", the tag written into feature properties.
  [[nodiscard]] std::string tag() const;
  /// Parses "ix,iy" or "ix_iy".
  static TileId parse(const std::string& text);
};

/// Lower-left corner of tile index k along one axis; k / 5 is the correctly
/// rounded value of k * 0.2.
inline double tile_edge(int k) { return static_cast<double>(k) / 5.0; }

/// Throws InvalidCoordinate outside lon [-180, 180), lat [-90, 90).
TileId tile_of(double lon, double lat);

/// Half-open bounds [min, max) of a tile. Throws InvalidCoordinate for
/// out-of-range indices.
Box tile_bounds(TileId t);

/// Tiles of `all` (kept in input order) containing at least one set pixel
/// centre of the built-up mask. The mask must be geographic.
std::vector<TileId> select_tiles(const RasterGrid& builtup,
                                 const std::vector<TileId>& all);

struct SceneEntry {
  std::string scene_id;
  RasterGrid raster;
  RasterGrid usable_mask;  // BinaryMask, 1 = usable
  double cloud_fraction = 0.0;
  int acquisition_year = 0;
  int acquisition_doy = 0;  // day of year, 0 when unknown
  int priority = 0;         // lower is preferred

  /// Throws ValidationError if the mask geometry differs from the raster or
  /// cloud_fraction is outside [0, 1].
  void validate() const;
};

struct SceneFilterOptions {
  double max_cloud = 0.10;
  int primary_year = 2019;
  int fallback_year = 2018;
};

/// Keeps primary-year scenes with cloud_fraction < max_cloud; when none
/// survive, keeps fallback-year scenes under the same threshold. Input is
/// the scene list of one tile. Order is preserved.
std::vector<SceneEntry> filter_scenes(std::vector<SceneEntry> scenes,
                                      const SceneFilterOptions& opts = {});

/// Strict weak ordering; `true` if the first scene is preferred.
using SceneComparator = std::function<bool(const SceneEntry&, const SceneEntry&)>;

/// Default preference: less cloud first, then the more recent acquisition.
bool prefer_clearer_then_newer(const SceneEntry& a, const SceneEntry& b);

/// Rewrites `priority` as 0..n-1 following the comparator (stable).
void assign_priorities(std::vector<SceneEntry>& scenes,
                       const SceneComparator& better = prefer_clearer_then_newer);

/// Each output pixel takes the value of the lowest-priority-number scene
/// whose usable mask is 1 there (nearest-neighbour sampling onto the
/// target); nodata where no scene is usable. Equal priorities fall back to
/// input order.
RasterGrid mosaic(const std::vector<SceneEntry>& scenes, const GridSpec& target,
                  double nodata);

}  // namespace gba
