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
#include "gba/raster_ops.hpp"

#include <algorithm>
#include <cmath>

#include "gba/error.hpp"

namespace gba {

namespace {

void crossings(const Ring& r, double y, std::vector<double>& xs) {
  for (std::size_t i = 0, j = r.size() - 1; i < r.size(); j = i++) {
    const Point& a = r[i];
    const Point& b = r[j];
    if ((a.y > y) != (b.y > y)) {
      xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
    }
  }
}

}  // namespace

std::vector<Cell> covered_cells(const GeoPolygon& polygon, const GridSpec& grid) {
  if (polygon.crs() != grid.crs) {
    throw CrsMismatch("polygon and grid use different coordinate references");
  }
  std::vector<Cell> cells;
  const Box& bb = polygon.bbox();
  const Box gb = grid.bounds();
  if (!bb.intersects(gb)) return cells;

  const int row_lo = std::max(
      0, static_cast<int>(std::floor((grid.origin_y - bb.max_y) / grid.pixel_h)) - 1);
  const int row_hi = std::min(
      grid.height - 1,
      static_cast<int>(std::floor((grid.origin_y - bb.min_y) / grid.pixel_h)) + 1);
  std::vector<double> xs;
  for (int row = row_lo; row <= row_hi; ++row) {
    const double cy = grid.center_y(row);
    if (cy < bb.min_y || cy > bb.max_y) continue;
    xs.clear();
    crossings(polygon.exterior(), cy, xs);
    for (const Ring& h : polygon.holes()) crossings(h, cy, xs);
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const double x0 = xs[k];
      const double x1 = xs[k + 1];
      int c = static_cast<int>(std::floor((x0 - grid.origin_x) / grid.pixel_w - 0.5));
      c = std::max(c, 0);
      while (c < grid.width && grid.center_x(c) < x0) ++c;
      for (; c < grid.width && grid.center_x(c) < x1; ++c) {
        cells.push_back({row, c});
      }
    }
  }
  return cells;
}

RasterGrid rasterize(std::span<const GeoPolygon> polygons, const GridSpec& grid,
                     std::span<const double> values, Semantic semantic,
                     double background, double nodata) {
  grid.validate();
  if (!values.empty() && values.size() != polygons.size()) {
    throw ValidationError("one burn value per polygon required");
  }
  const Semantic sem = values.empty() ? Semantic::BinaryMask : semantic;
  std::vector<double> out(grid.size(), background);
  for (std::size_t i = 0; i < polygons.size(); ++i) {
    const double v = values.empty() ? 1.0 : values[i];
    for (const Cell& c : covered_cells(polygons[i], grid)) {
      out[static_cast<std::size_t>(c.row) * grid.width + c.col] = v;
    }
  }
  return RasterGrid(grid, sem, nodata, std::move(out));
}

RasterGrid rasterize(std::span<const FootprintRecord> records,
                     const GridSpec& grid, std::span<const double> values,
                     Semantic semantic, double background, double nodata) {
  std::vector<GeoPolygon> polys;
  polys.reserve(records.size());
  for (const auto& r : records) polys.push_back(r.geometry);
  return rasterize(polys, grid, values, semantic, background, nodata);
}

std::pair<int, int> radius_in_pixels(const GridSpec& grid, double radius_m) {
  if (radius_m < 0.0) throw ValidationError("radius must be non-negative");
  const auto [pw, ph] = grid.pixel_size_m();
  return {static_cast<int>(std::floor(radius_m / pw + 0.5)),
          static_cast<int>(std::floor(radius_m / ph + 0.5))};
}

namespace {

// 1-D window filter along rows (horizontal) or columns. With `all` the
// output is set iff every in-grid pixel of the window is set (erosion),
// otherwise iff any is (dilation).
std::vector<double> window_pass(const std::vector<double>& in, int w, int h,
                                int radius, bool horizontal, bool all) {
  std::vector<double> out(in.size(), 0.0);
  const int lines = horizontal ? h : w;
  const int len = horizontal ? w : h;
  std::vector<int> prefix(static_cast<std::size_t>(len) + 1);
  for (int line = 0; line < lines; ++line) {
    auto idx = [&](int k) {
      return horizontal ? static_cast<std::size_t>(line) * w + k
                        : static_cast<std::size_t>(k) * w + line;
    };
    prefix[0] = 0;
    for (int k = 0; k < len; ++k) {
      prefix[k + 1] = prefix[k] + (in[idx(k)] != 0.0 ? 1 : 0);
    }
    for (int k = 0; k < len; ++k) {
      const int lo = std::max(0, k - radius);
      const int hi = std::min(len - 1, k + radius);
      const int set = prefix[hi + 1] - prefix[lo];
      out[idx(k)] = all ? (set == hi - lo + 1 ? 1.0 : 0.0) : (set > 0 ? 1.0 : 0.0);
    }
  }
  return out;
}

RasterGrid morph(const RasterGrid& mask, int rx, int ry, bool erode) {
  require_semantic(mask, Semantic::BinaryMask);
  if (rx < 0 || ry < 0) throw ValidationError("negative window");
  std::vector<double> v(mask.values().begin(), mask.values().end());
  if (rx > 0) v = window_pass(v, mask.width(), mask.height(), rx, true, erode);
  if (ry > 0) v = window_pass(v, mask.width(), mask.height(), ry, false, erode);
  return mask.with_values(std::move(v));
}

}  // namespace

RasterGrid dilate_pixels(const RasterGrid& mask, int rx, int ry) {
  return morph(mask, rx, ry, false);
}

RasterGrid erode_pixels(const RasterGrid& mask, int rx, int ry) {
  return morph(mask, rx, ry, true);
}

RasterGrid dilate_mask(const RasterGrid& mask, double radius_m) {
  const auto [rx, ry] = radius_in_pixels(mask.spec(), radius_m);
  return dilate_pixels(mask, rx, ry);
}

RasterGrid resample_nearest(const RasterGrid& source, const GridSpec& target,
                            double fill) {
  target.validate();
  if (source.spec().crs != target.crs) {
    throw CrsMismatch("cannot resample between coordinate references");
  }
  if (source.spec().same_geometry(target, 0.0)) return source;
  std::vector<double> out(target.size(), fill);
  for (int row = 0; row < target.height; ++row) {
    for (int col = 0; col < target.width; ++col) {
      if (auto c = source.spec().cell_of(target.center({row, col}))) {
        out[static_cast<std::size_t>(row) * target.width + col] =
            source.at(c->row, c->col);
      }
    }
  }
  return RasterGrid(target, source.semantic(), source.nodata(), std::move(out));
}

}  // namespace gba
