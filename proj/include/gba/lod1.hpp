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

#include <optional>
#include <utility>
#include <vector>

#include "gba/geometry.hpp"
#include "gba/raster.hpp"

namespace gba {

inline constexpr double kMinValidHeightM = 1.0;

/// Vertical prism: footprint extruded to height_m.
struct Lod1Record {
  FootprintRecord footprint;
  std::optional<double> height_m;
  std::optional<double> uncertainty_m2;
  std::optional<double> volume_m3;

  /// Height present and at least min_h metres.
  [[nodiscard]] bool valid_height(double min_h = kMinValidHeightM) const {
    return height_m && *height_m >= min_h;
  }
};

/// Up to four overlapping height predictions on one grid.
class PredictionStack {
 public:
  /// Throws GridMismatch when layers differ in geometry and
  /// ValidationError for an empty or oversized stack.
  explicit PredictionStack(std::vector<RasterGrid> layers);

  [[nodiscard]] const std::vector<RasterGrid>& layers() const { return layers_; }
  [[nodiscard]] const GridSpec& spec() const { return layers_.front().spec(); }
  /// Number of layers with data at each pixel.
  [[nodiscard]] const std::vector<int>& coverage_count() const { return coverage_; }

 private:
  std::vector<RasterGrid> layers_;
  std::vector<int> coverage_;
};

inline constexpr int kMaxTtaLayers = 4;

/// Per-pixel mean and population variance over the layers with data.
/// Variance is 0 where one layer covers the pixel; both outputs are nodata
/// (the first layer's nodata) where none does.
std::pair<RasterGrid, RasterGrid> tta_aggregate(const PredictionStack& stack);

/// Height is the maximum over pixel centres inside the footprint (negative
/// values clamp to 0); uncertainty is the variance at that pixel, the
/// first one in row-major order on ties. A footprint containing no pixel
/// centre uses the pixel under its centroid.
Lod1Record assign_height(const FootprintRecord& footprint, const RasterGrid& height,
                         const RasterGrid& variance);

struct Lod1Build {
  std::vector<Lod1Record> records;
  /// Share of records with a height of at least min_h; nullopt when empty.
  std::optional<double> completeness;
};

Lod1Build build_lod1(const std::vector<FootprintRecord>& fused,
                     const RasterGrid& height, const RasterGrid& variance,
                     double min_h = kMinValidHeightM);

}  // namespace gba
