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
#include <string>
#include <vector>

#include "gba/geometry.hpp"
#include "gba/raster.hpp"

namespace gba {

struct SimplifyParams {
  double tolerance_m = 3.0;
  double min_area_m2 = 20.0;
  int min_ring_vertices = 4;

  void validate() const;
};

/// 1 where prob >= t, 0 elsewhere (nodata counts as 0). t must be in (0, 1).
RasterGrid threshold_mask(const RasterGrid& prob, double t = 0.5);

/// Morphological stand-in for a learned regulariser: 3x3 opening followed
/// by 3x3 closing.
RasterGrid regularize_mask(const RasterGrid& mask);

/// One polygon per 4-connected component of 1-pixels, following pixel
/// edges. Enclosed background becomes holes. Polygons come out in the
/// row-major order of each component's first pixel.
std::vector<GeoPolygon> trace_polygons(const RasterGrid& mask);

/// Douglas-Peucker per ring followed by collinear-vertex removal. Returns
/// nullopt when the result is smaller than min_area_m2. If simplification
/// would produce an invalid polygon the input is returned unchanged (still
/// subject to the area filter). Holes that collapse are dropped.
std::optional<GeoPolygon> simplify(const GeoPolygon& p,
                                   const SimplifyParams& params = {});

struct FilterReport {
  std::vector<FootprintRecord> kept;
  std::vector<std::string> removed_ids;
  std::size_t outside_extent = 0;  // subset of removed with no cell on the mask
};

/// Keeps polygons touching the built-up mask dilated by radius_m. A polygon
/// touches the mask if any pixel centre inside it (or, for polygons smaller
/// than a pixel, the pixel holding its centroid) is set after dilation.
FilterReport filter_false_positives(const std::vector<FootprintRecord>& polys,
                                    const RasterGrid& builtup,
                                    double radius_m = 250.0);

struct PolygonizeOptions {
  double threshold = 0.5;
  bool regularize = true;
  SimplifyParams simplify;
  double dilation_m = 250.0;
};

/// threshold -> regularise -> trace -> simplify -> false-positive filter.
/// Records are tagged Source::PSRDerived with ids "psr_<tag>_<n>".
FilterReport polygonize_raster(const RasterGrid& prob,
                               const RasterGrid* builtup,
                               const PolygonizeOptions& opts,
                               const std::string& tag);

}  // namespace gba
