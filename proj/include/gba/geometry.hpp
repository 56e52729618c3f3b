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
#include <string_view>
#include <vector>

namespace gba {

// Coordinate reference of a polygon or raster. Geographic coordinates are
// (lon, lat) degrees on WGS84; Planar coordinates are metres in some local
// projected frame; EqualAreaCylindrical is the global Lambert cylindrical
// equal-area grid used for volume maps.
enum class Crs { Geographic, Planar, EqualAreaCylindrical };

std::string_view to_string(Crs crs);
Crs crs_from_string(std::string_view name);

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Closed ring: front() == back().
using Ring = std::vector<Point>;

struct Box {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  [[nodiscard]] bool intersects(const Box& other) const {
    return min_x <= other.max_x && other.min_x <= max_x &&
           min_y <= other.max_y && other.min_y <= max_y;
  }
  [[nodiscard]] Point center() const {
    return {0.5 * (min_x + max_x), 0.5 * (min_y + max_y)};
  }
  void expand(const Box& other);
  void expand(Point p);

  friend bool operator==(const Box&, const Box&) = default;
};

Box bbox_of(const Ring& ring);

// Shoelace area in native units; positive for counter-clockwise rings.
double signed_area(const Ring& ring);

/// A polygon with holes. Instances are always valid: rings are closed,
/// consecutive duplicate vertices are removed, the exterior runs
/// counter-clockwise and holes clockwise, and the rings form an OGC-valid
/// polygon. Construct through make() or repair().
class GeoPolygon {
 public:
  /// Throws InvalidGeometry on rings with fewer than 4 vertices, zero
  /// area, self-intersections or holes outside the exterior.
  static GeoPolygon make(Ring exterior, std::vector<Ring> holes = {},
                         Crs crs = Crs::Geographic);

  /// Axis-aligned rectangle helper.
  static GeoPolygon rectangle(double min_x, double min_y, double max_x,
                              double max_y, Crs crs = Crs::Geographic);

  [[nodiscard]] const Ring& exterior() const { return exterior_; }
  [[nodiscard]] const std::vector<Ring>& holes() const { return holes_; }
  [[nodiscard]] Crs crs() const { return crs_; }
  [[nodiscard]] const Box& bbox() const { return bbox_; }

  /// Area-weighted centroid in native coordinates.
  [[nodiscard]] Point centroid() const;
  [[nodiscard]] std::size_t vertex_count() const;

  /// Even-odd point containment in native coordinates. Points on the
  /// boundary may go either way.
  [[nodiscard]] bool contains(Point p) const;

  [[nodiscard]] GeoPolygon translated(double dx, double dy) const;

  friend bool operator==(const GeoPolygon&, const GeoPolygon&) = default;

 private:
  GeoPolygon() = default;
  friend struct GeoPolygonAccess;

  Ring exterior_;
  std::vector<Ring> holes_;
  Crs crs_ = Crs::Geographic;
  Box bbox_;
};

struct RepairResult {
  GeoPolygon polygon;
  bool repaired = false;
};

/// Like GeoPolygon::make, but self-intersecting rings are rebuilt once with
/// the even-odd rule. When the rebuilt shape has several parts the largest
/// is kept. Throws InvalidGeometry if the result is still invalid.
RepairResult repair(Ring exterior, std::vector<Ring> holes = {},
                    Crs crs = Crs::Geographic);

/// Area in square metres, computed on a local azimuthal equal-area
/// projection centred on the polygon for geographic input.
double polygon_area_m2(const GeoPolygon& p);

/// Perimeter (exterior plus holes) in metres, same projection as
/// polygon_area_m2.
double polygon_perimeter_m(const GeoPolygon& p);

/// Area of the geometric intersection in square metres. Throws CrsMismatch
/// if the polygons use different coordinate references.
double intersection_area_m2(const GeoPolygon& a, const GeoPolygon& b);

/// Intersection over union of two polygons, in [0, 1].
double polygon_iou(const GeoPolygon& a, const GeoPolygon& b);

enum class Source { OSM, OpenBuildings, Microsoft, CLSM, PSRDerived, Other };

/// Fixed preference order used for base-layer fallback and tie breaks.
inline constexpr Source kSourceOrder[] = {Source::OSM, Source::OpenBuildings,
                                          Source::Microsoft, Source::CLSM,
                                          Source::PSRDerived, Source::Other};

int source_rank(Source s);
std::string_view to_string(Source s);
/// Accepts the canonical names and a few common aliases ("osm", "google",
/// "ms", "psr"). Unknown names map to Source::Other.
Source source_from_string(std::string_view name);

struct FootprintRecord {
  std::string id;
  GeoPolygon geometry;
  Source source = Source::Other;
  std::string source_label;  // only meaningful for Source::Other
  std::optional<double> height_m;
  std::optional<std::string> admin_id;

  [[nodiscard]] std::string source_name() const;
};

}  // namespace gba
