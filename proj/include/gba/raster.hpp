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
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "gba/geometry.hpp"

namespace gba {

enum class Semantic {
  Probability,
  HeightMeters,
  BinaryMask,
  VarianceM2,
  VolumeM3,
  LandCoverClass
};

std::string_view to_string(Semantic s);
Semantic semantic_from_string(std::string_view name);

struct Cell {
  int row = 0;
  int col = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Georeferencing of a north-up grid. origin is the upper-left corner;
/// pixel (row, col) spans [origin_x + col*pixel_w, origin_x + (col+1)*pixel_w]
/// horizontally and [origin_y - (row+1)*pixel_h, origin_y - row*pixel_h]
/// vertically.
struct GridSpec {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double pixel_w = 1.0;
  double pixel_h = 1.0;
  int width = 0;
  int height = 0;
  Crs crs = Crs::Planar;

  /// Throws InvalidGrid on non-positive pixel size or empty extent.
  void validate() const;

  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  [[nodiscard]] double center_x(int col) const {
    return origin_x + (col + 0.5) * pixel_w;
  }
  [[nodiscard]] double center_y(int row) const {
    return origin_y - (row + 0.5) * pixel_h;
  }
  [[nodiscard]] Point center(Cell c) const {
    return {center_x(c.col), center_y(c.row)};
  }
  [[nodiscard]] Box bounds() const {
    return {origin_x, origin_y - height * pixel_h, origin_x + width * pixel_w,
            origin_y};
  }
  /// Cell containing the point, if inside the grid. Cells are half-open on
  /// their right and bottom edges.
  [[nodiscard]] std::optional<Cell> cell_of(Point p) const;

  /// Pixel size in metres (horizontal, vertical). Geographic grids are
  /// measured at the latitude of the grid centre.
  [[nodiscard]] std::pair<double, double> pixel_size_m() const;

  /// Ground area of one pixel in square metres at the given row.
  [[nodiscard]] double pixel_area_m2(int row) const;

  [[nodiscard]] bool same_geometry(const GridSpec& o, double tol = 1e-9) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Single-band raster holding doubles in row-major order. The semantic tag
/// constrains the admissible values and is checked at construction.
class RasterGrid {
 public:
  RasterGrid(GridSpec spec, Semantic semantic, double nodata,
             std::vector<double> values);
  /// Raster filled with a constant.
  RasterGrid(GridSpec spec, Semantic semantic, double nodata, double fill);

  [[nodiscard]] const GridSpec& spec() const { return spec_; }
  [[nodiscard]] Semantic semantic() const { return semantic_; }
  [[nodiscard]] double nodata() const { return nodata_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] int width() const { return spec_.width; }
  [[nodiscard]] int height() const { return spec_.height; }

  [[nodiscard]] double at(int row, int col) const {
    return values_[index(row, col)];
  }
  [[nodiscard]] bool is_nodata(double v) const;
  [[nodiscard]] bool valid(int row, int col) const {
    return !is_nodata(at(row, col));
  }
  [[nodiscard]] std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * spec_.width + col;
  }

  /// Number of cells equal to 1 (masks) or, generally, non-zero and valid.
  [[nodiscard]] std::size_t count_nonzero() const;

  /// Copy with values replaced; re-validated.
  [[nodiscard]] RasterGrid with_values(std::vector<double> values) const;
  [[nodiscard]] RasterGrid with_semantic(Semantic semantic) const;

  friend bool operator==(const RasterGrid&, const RasterGrid&) = default;

 private:
  void check() const;

  GridSpec spec_;
  Semantic semantic_;
  double nodata_;
  std::vector<double> values_;
};

/// Throws SemanticMismatch unless the raster carries the expected semantic.
void require_semantic(const RasterGrid& r, Semantic expected);

}  // namespace gba
