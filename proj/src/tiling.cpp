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
#include "gba/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "gba/error.hpp"

namespace gba {

std::string TileId::tag() const { return fmt::format("{}_{}", ix, iy); }

TileId TileId::parse(const std::string& text) {
  const auto sep = text.find_first_of(",_");
  if (sep == std::string::npos) {
    throw ValidationError("tile must look like 'ix,iy': " + text);
  }
  try {
    std::size_t used_x = 0;
    std::size_t used_y = 0;
    const int ix = std::stoi(text.substr(0, sep), &used_x);
    const int iy = std::stoi(text.substr(sep + 1), &used_y);
    if (used_x != sep || used_y != text.size() - sep - 1) throw std::invalid_argument("");
    if (ix < kTileMinX || ix >= kTileMaxX || iy < kTileMinY || iy >= kTileMaxY) {
      throw InvalidCoordinate("tile index out of range: " + text);
    }
    return {ix, iy};
  } catch (const std::logic_error&) {
    throw ValidationError("tile must look like 'ix,iy': " + text);
  }
}

namespace {

// floor(v / 0.2), consistent with tile_edge() at the cell boundaries.
int tile_index(double v) {
  int k = static_cast<int>(std::floor(v * 5.0));
  if (tile_edge(k) > v) --k;
  if (tile_edge(k + 1) <= v) ++k;
  return k;
}

}  // namespace

TileId tile_of(double lon, double lat) {
  if (!(lon >= -180.0 && lon < 180.0) || !(lat >= -90.0 && lat < 90.0)) {
    throw InvalidCoordinate(fmt::format("coordinate ({}, {}) out of range", lon, lat));
  }
  return {tile_index(lon), tile_index(lat)};
}

Box tile_bounds(TileId t) {
  if (t.ix < kTileMinX || t.ix >= kTileMaxX || t.iy < kTileMinY ||
      t.iy >= kTileMaxY) {
    throw InvalidCoordinate(fmt::format("tile ({}, {}) out of range", t.ix, t.iy));
  }
  return {tile_edge(t.ix), tile_edge(t.iy), tile_edge(t.ix + 1),
          tile_edge(t.iy + 1)};
}

std::vector<TileId> select_tiles(const RasterGrid& builtup,
                                 const std::vector<TileId>& all) {
  require_semantic(builtup, Semantic::BinaryMask);
  if (builtup.spec().crs != Crs::Geographic) {
    throw CrsMismatch("tile selection needs a geographic built-up mask");
  }
  std::set<TileId> hit;
  const GridSpec& g = builtup.spec();
  for (int row = 0; row < g.height; ++row) {
    const double lat = g.center_y(row);
    if (!(lat >= -90.0 && lat < 90.0)) continue;
    for (int col = 0; col < g.width; ++col) {
      if (builtup.at(row, col) != 1.0) continue;
      const double lon = g.center_x(col);
      if (!(lon >= -180.0 && lon < 180.0)) continue;
      hit.insert(tile_of(lon, lat));
    }
  }
  std::vector<TileId> out;
  for (const TileId& t : all) {
    if (hit.contains(t)) out.push_back(t);
  }
  return out;
}

void SceneEntry::validate() const {
  require_semantic(usable_mask, Semantic::BinaryMask);
  if (!raster.spec().same_geometry(usable_mask.spec())) {
    throw GridMismatch("scene " + scene_id + ": mask geometry differs from raster");
  }
  if (!(cloud_fraction >= 0.0 && cloud_fraction <= 1.0)) {
    throw ValidationError("scene " + scene_id + ": cloud fraction outside [0, 1]");
  }
}

std::vector<SceneEntry> filter_scenes(std::vector<SceneEntry> scenes,
                                      const SceneFilterOptions& opts) {
  auto keep_year = [&](int year) {
    std::vector<SceneEntry> out;
    for (const SceneEntry& s : scenes) {
      if (s.acquisition_year == year && s.cloud_fraction < opts.max_cloud) {
        out.push_back(s);
      }
    }
    return out;
  };
  auto primary = keep_year(opts.primary_year);
  if (!primary.empty()) return primary;
  return keep_year(opts.fallback_year);
}

bool prefer_clearer_then_newer(const SceneEntry& a, const SceneEntry& b) {
  if (a.cloud_fraction != b.cloud_fraction) {
    return a.cloud_fraction < b.cloud_fraction;
  }
  if (a.acquisition_year != b.acquisition_year) {
    return a.acquisition_year > b.acquisition_year;
  }
  return a.acquisition_doy > b.acquisition_doy;
}

void assign_priorities(std::vector<SceneEntry>& scenes,
                       const SceneComparator& better) {
  std::vector<std::size_t> order(scenes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return better(scenes[l], scenes[r]);
  });
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    scenes[order[rank]].priority = static_cast<int>(rank);
  }
}

RasterGrid mosaic(const std::vector<SceneEntry>& scenes, const GridSpec& target,
                  double nodata) {
  target.validate();
  std::vector<std::size_t> order(scenes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return scenes[l].priority < scenes[r].priority;
  });
  for (const SceneEntry& s : scenes) {
    s.validate();
    if (s.raster.spec().crs != target.crs) {
      throw CrsMismatch("scene " + s.scene_id + " is in a different CRS");
    }
  }

  std::vector<double> out(target.size(), nodata);
  for (int row = 0; row < target.height; ++row) {
    for (int col = 0; col < target.width; ++col) {
      const Point c = target.center({row, col});
      for (std::size_t k : order) {
        const SceneEntry& s = scenes[k];
        const auto cell = s.raster.spec().cell_of(c);
        if (!cell || s.usable_mask.at(cell->row, cell->col) != 1.0) continue;
        out[static_cast<std::size_t>(row) * target.width + col] =
            s.raster.at(cell->row, cell->col);
        break;
      }
    }
  }
  const Semantic sem =
      scenes.empty() ? Semantic::LandCoverClass : scenes.front().raster.semantic();
  // Scene rasters are reflectance-like; keep their semantic unless mixed.
  for (const SceneEntry& s : scenes) {
    if (s.raster.semantic() != sem) {
      throw SemanticMismatch("scenes carry different raster semantics");
    }
  }
  return RasterGrid(target, sem, nodata, std::move(out));
}

}  // namespace gba
