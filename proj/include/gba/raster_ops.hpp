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

#include <span>
#include <utility>
#include <vector>

#include "gba/geometry.hpp"
#include "gba/raster.hpp"

namespace gba {

/// Cells whose centres fall inside the polygon, in row-major order.
/// The polygon and grid must share a CRS (CrsMismatch otherwise).
std::vector<Cell> covered_cells(const GeoPolygon& polygon, const GridSpec& grid);

/// Burns polygons into a new raster. A pixel is set iff its centre lies
/// inside a polygon; on overlap the later polygon wins. With empty
/// `values` every polygon burns 1 into a BinaryMask, otherwise polygon i
/// burns values[i] into a raster with the given semantic.
RasterGrid rasterize(std::span<const GeoPolygon> polygons, const GridSpec& grid,
                     std::span<const double> values = {},
                     Semantic semantic = Semantic::BinaryMask,
                     double background = 0.0, double nodata = 0.0);
RasterGrid rasterize(std::span<const FootprintRecord> records,
                     const GridSpec& grid,
                     std::span<const double> values = {},
                     Semantic semantic = Semantic::BinaryMask,
                     double background = 0.0, double nodata = 0.0);

/// Half-window in pixels (columns, rows) for a radius in metres, rounded
/// half-up.
std::pair<int, int> radius_in_pixels(const GridSpec& grid, double radius_m);

/// Square-window binary dilation. Output contains the input.
RasterGrid dilate_mask(const RasterGrid& mask, double radius_m);

/// Dilation/erosion with an explicit half-window in pixels. Windows are
/// clipped at the raster border (pixels outside the grid are ignored).
RasterGrid dilate_pixels(const RasterGrid& mask, int rx, int ry);
RasterGrid erode_pixels(const RasterGrid& mask, int rx, int ry);

/// Nearest-neighbour resampling onto `target` (same CRS). Target pixels
/// outside the source get `fill`.
RasterGrid resample_nearest(const RasterGrid& source, const GridSpec& target,
                            double fill);

}  // namespace gba
