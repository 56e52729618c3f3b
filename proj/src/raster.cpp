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
#include "gba/raster.hpp"

#include <cmath>
#include <string>

#include "gba/error.hpp"
#include "gba/planar.hpp"

namespace gba {

std::string_view to_string(Semantic s) {
  switch (s) {
    case Semantic::Probability:
      return "Probability";
    case Semantic::HeightMeters:
      return "HeightMeters";
    case Semantic::BinaryMask:
      return "BinaryMask";
    case Semantic::VarianceM2:
      return "VarianceM2";
    case Semantic::VolumeM3:
      return "VolumeM3";
    case Semantic::LandCoverClass:
      return "LandCoverClass";
  }
  return "Probability";
}

Semantic semantic_from_string(std::string_view name) {
  for (Semantic s :
       {Semantic::Probability, Semantic::HeightMeters, Semantic::BinaryMask,
        Semantic::VarianceM2, Semantic::VolumeM3, Semantic::LandCoverClass}) {
    if (to_string(s) == name) return s;
  }
  throw ValidationError("unknown raster semantic '" + std::string(name) + "'");
}

void GridSpec::validate() const {
  if (!(pixel_w > 0.0) || !(pixel_h > 0.0)) {
    throw InvalidGrid("pixel size must be positive");
  }
  if (width <= 0 || height <= 0) throw InvalidGrid("grid has no pixels");
  if (!std::isfinite(origin_x) || !std::isfinite(origin_y)) {
    throw InvalidGrid("grid origin is not finite");
  }
}

std::optional<Cell> GridSpec::cell_of(Point p) const {
  const double fc = std::floor((p.x - origin_x) / pixel_w);
  const double fr = std::floor((origin_y - p.y) / pixel_h);
  if (fc < 0 || fr < 0 || fc >= width || fr >= height) return std::nullopt;
  return Cell{static_cast<int>(fr), static_cast<int>(fc)};
}

std::pair<double, double> GridSpec::pixel_size_m() const {
  if (crs != Crs::Geographic) return {pixel_w, pixel_h};
  const double lat = (origin_y - 0.5 * height * pixel_h) * kDegToRad;
  const double m_per_deg = kEarthRadiusM * kDegToRad;
  return {pixel_w * m_per_deg * std::cos(lat), pixel_h * m_per_deg};
}

double GridSpec::pixel_area_m2(int row) const {
  if (crs != Crs::Geographic) return pixel_w * pixel_h;
  // Exact spherical cell area between two parallels.
  const double top = (origin_y - row * pixel_h) * kDegToRad;
  const double bottom = (origin_y - (row + 1) * pixel_h) * kDegToRad;
  return kEarthRadiusM * kEarthRadiusM * pixel_w * kDegToRad *
         std::abs(std::sin(top) - std::sin(bottom));
}

bool GridSpec::same_geometry(const GridSpec& o, double tol) const {
  auto near = [tol](double a, double b) {
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(a));
  };
  return width == o.width && height == o.height && crs == o.crs &&
         near(origin_x, o.origin_x) && near(origin_y, o.origin_y) &&
         near(pixel_w, o.pixel_w) && near(pixel_h, o.pixel_h);
}

RasterGrid::RasterGrid(GridSpec spec, Semantic semantic, double nodata,
                       std::vector<double> values)
    : spec_(spec),
      semantic_(semantic),
      nodata_(nodata),
      values_(std::move(values)) {
  check();
}

RasterGrid::RasterGrid(GridSpec spec, Semantic semantic, double nodata,
                       double fill)
    : spec_(spec), semantic_(semantic), nodata_(nodata) {
  spec_.validate();
  values_.assign(spec_.size(), fill);
  check();
}

bool RasterGrid::is_nodata(double v) const {
  if (std::isnan(nodata_)) return std::isnan(v);
  return v == nodata_;
}

void RasterGrid::check() const {
  spec_.validate();
  if (values_.size() != spec_.size()) {
    throw InvalidGrid("raster has " + std::to_string(values_.size()) +
                      " values, expected " + std::to_string(spec_.size()));
  }
  for (double v : values_) {
    switch (semantic_) {
      case Semantic::Probability:
        if (!is_nodata(v) && !(v >= 0.0 && v <= 1.0)) {
          throw InvalidGrid("probability outside [0, 1]");
        }
        break;
      case Semantic::BinaryMask:
        if (v != 0.0 && v != 1.0) throw InvalidGrid("mask value not in {0, 1}");
        break;
      case Semantic::HeightMeters:
      case Semantic::VarianceM2:
      case Semantic::VolumeM3:
        // Height rasters straight from a network may be slightly negative;
        // consumers clamp. Only reject non-finite garbage.
        if (!is_nodata(v) && !std::isfinite(v)) {
          throw InvalidGrid("non-finite raster value");
        }
        if (semantic_ != Semantic::HeightMeters && !is_nodata(v) && v < 0.0) {
          throw InvalidGrid("negative variance or volume");
        }
        break;
      case Semantic::LandCoverClass:
        break;
    }
  }
}

std::size_t RasterGrid::count_nonzero() const {
  std::size_t n = 0;
  for (double v : values_) {
    if (v != 0.0 && !is_nodata(v)) ++n;
  }
  return n;
}

RasterGrid RasterGrid::with_values(std::vector<double> values) const {
  return RasterGrid(spec_, semantic_, nodata_, std::move(values));
}

RasterGrid RasterGrid::with_semantic(Semantic semantic) const {
  return RasterGrid(spec_, semantic, nodata_, values_);
}

void require_semantic(const RasterGrid& r, Semantic expected) {
  if (r.semantic() != expected) {
    throw SemanticMismatch("expected a " + std::string(to_string(expected)) +
                           " raster, got " +
                           std::string(to_string(r.semantic())));
  }
}

}  // namespace gba
