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

// Projections and the Boost.Geometry planar types used for polygon overlay.

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/box.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include "gba/geometry.hpp"

namespace gba {

namespace bg = boost::geometry;

using PlanarPoint = bg::model::d2::point_xy<double>;
// Counter-clockwise exterior, closed rings; matches GeoPolygon.
using PlanarPolygon = bg::model::polygon<PlanarPoint, false, true>;
using PlanarMultiPolygon = bg::model::multi_polygon<PlanarPolygon>;
using PlanarBox = bg::model::box<PlanarPoint>;

// Authalic sphere radius; equal-area projections are exact on this sphere.
inline constexpr double kEarthRadiusM = 6371007.181;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;

/// Spherical Lambert azimuthal equal-area projection.
class LaeaProjection {
 public:
  LaeaProjection(double lon0_deg, double lat0_deg);

  [[nodiscard]] Point forward(Point lonlat) const;
  [[nodiscard]] Point inverse(Point xy) const;

 private:
  double lon0_;
  double sin_lat0_;
  double cos_lat0_;
};

/// Lambert cylindrical equal-area on the authalic sphere:
/// x = R * lon, y = R * sin(lat).
Point cea_forward(Point lonlat);
Point cea_inverse(Point xy);

/// Maps native coordinates of one CRS into a metric plane. Geographic input
/// goes through a LAEA projection centred on the frame origin; the other
/// CRSes are already metric and pass through unchanged.
inline constexpr double kDensifyDeg = 0.01;

class LocalFrame {
 public:
  LocalFrame(Crs crs, Point center);
  static LocalFrame around(Crs crs, const Box& box) {
    return LocalFrame(crs, box.center());
  }

  [[nodiscard]] Crs crs() const { return crs_; }
  [[nodiscard]] Point to_planar(Point native) const;
  [[nodiscard]] Point to_native(Point planar) const;
  /// Geographic edges longer than kDensifyDeg are subdivided first.
  [[nodiscard]] Ring project_ring(const Ring& r) const;
  [[nodiscard]] PlanarPolygon project(const GeoPolygon& p) const;
  [[nodiscard]] PlanarBox project_box(const Box& b) const;

 private:
  Crs crs_;
  LaeaProjection laea_;
};

/// Native (unprojected) conversion, used for topology checks.
PlanarPolygon to_boost(const GeoPolygon& p);
PlanarPolygon to_boost(const Ring& exterior, const std::vector<Ring>& holes);

/// Projects a polygon into the frame's metric plane as a Planar polygon.
GeoPolygon project_polygon(const GeoPolygon& p, const LocalFrame& frame);

double area_of(const PlanarMultiPolygon& mp);

/// Balanced pairwise union; much faster than folding for large inputs.
PlanarMultiPolygon union_all(std::vector<PlanarPolygon> polys);

}  // namespace gba
