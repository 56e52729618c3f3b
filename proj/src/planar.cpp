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
#include "gba/planar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace gba {

LaeaProjection::LaeaProjection(double lon0_deg, double lat0_deg)
    : lon0_(lon0_deg * kDegToRad),
      sin_lat0_(std::sin(lat0_deg * kDegToRad)),
      cos_lat0_(std::cos(lat0_deg * kDegToRad)) {}

Point LaeaProjection::forward(Point lonlat) const {
  double dlon = lonlat.x * kDegToRad - lon0_;
  if (dlon > kPi) dlon -= 2.0 * kPi;
  if (dlon < -kPi) dlon += 2.0 * kPi;
  const double lat = lonlat.y * kDegToRad;
  const double sin_lat = std::sin(lat);
  const double cos_lat = std::cos(lat);
  const double cos_dlon = std::cos(dlon);
  const double denom = 1.0 + sin_lat0_ * sin_lat + cos_lat0_ * cos_lat * cos_dlon;
  const double k = std::sqrt(2.0 / denom);
  return {kEarthRadiusM * k * cos_lat * std::sin(dlon),
          kEarthRadiusM * k *
              (cos_lat0_ * sin_lat - sin_lat0_ * cos_lat * cos_dlon)};
}

Point LaeaProjection::inverse(Point xy) const {
  const double rho = std::hypot(xy.x, xy.y);
  const double lat0 = std::atan2(sin_lat0_, cos_lat0_);
  if (rho == 0.0) return {lon0_ / kDegToRad, lat0 / kDegToRad};
  const double c = 2.0 * std::asin(rho / (2.0 * kEarthRadiusM));
  const double sin_c = std::sin(c);
  const double cos_c = std::cos(c);
  const double lat =
      std::asin(cos_c * sin_lat0_ + xy.y * sin_c * cos_lat0_ / rho);
  const double lon = lon0_ + std::atan2(xy.x * sin_c, rho * cos_lat0_ * cos_c -
                                                          xy.y * sin_lat0_ * sin_c);
  return {lon / kDegToRad, lat / kDegToRad};
}

Point cea_forward(Point lonlat) {
  return {kEarthRadiusM * lonlat.x * kDegToRad,
          kEarthRadiusM * std::sin(lonlat.y * kDegToRad)};
}

Point cea_inverse(Point xy) {
  return {xy.x / kEarthRadiusM / kDegToRad,
          std::asin(std::clamp(xy.y / kEarthRadiusM, -1.0, 1.0)) / kDegToRad};
}

LocalFrame::LocalFrame(Crs crs, Point center)
    : crs_(crs), laea_(center.x, center.y) {}

Point LocalFrame::to_planar(Point native) const {
  return crs_ == Crs::Geographic ? laea_.forward(native) : native;
}

Point LocalFrame::to_native(Point planar) const {
  return crs_ == Crs::Geographic ? laea_.inverse(planar) : planar;
}

Ring LocalFrame::project_ring(const Ring& r) const {
  if (crs_ != Crs::Geographic) return r;
  Ring out;
  out.reserve(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (i > 0) {
      // Long lon/lat edges bend under the projection.
      const Point a = r[i - 1];
      const Point b = r[i];
      const double span = std::max(std::abs(b.x - a.x), std::abs(b.y - a.y));
      const int steps = std::min(4096, static_cast<int>(std::ceil(span / kDensifyDeg)));
      for (int k = 1; k < steps; ++k) {
        const double t = static_cast<double>(k) / steps;
        out.push_back(laea_.forward({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)}));
      }
    }
    out.push_back(laea_.forward(r[i]));
  }
  return out;
}

PlanarPolygon LocalFrame::project(const GeoPolygon& p) const {
  PlanarPolygon out;
  for (const Point& m : project_ring(p.exterior())) out.outer().emplace_back(m.x, m.y);
  for (const Ring& h : p.holes()) {
    auto& inner = out.inners().emplace_back();
    for (const Point& m : project_ring(h)) inner.emplace_back(m.x, m.y);
  }
  return out;
}

PlanarBox LocalFrame::project_box(const Box& b) const {
  if (crs_ != Crs::Geographic) {
    return {{b.min_x, b.min_y}, {b.max_x, b.max_y}};
  }
  // The image of a lon/lat box is curved; bound it by sampling its edges.
  Box out{std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity()};
  constexpr int kSteps = 8;
  for (int i = 0; i <= kSteps; ++i) {
    const double t = static_cast<double>(i) / kSteps;
    const double x = b.min_x + t * (b.max_x - b.min_x);
    const double y = b.min_y + t * (b.max_y - b.min_y);
    out.expand(to_planar({x, b.min_y}));
    out.expand(to_planar({x, b.max_y}));
    out.expand(to_planar({b.min_x, y}));
    out.expand(to_planar({b.max_x, y}));
  }
  return {{out.min_x, out.min_y}, {out.max_x, out.max_y}};
}

PlanarPolygon to_boost(const Ring& exterior, const std::vector<Ring>& holes) {
  PlanarPolygon out;
  for (const Point& q : exterior) out.outer().emplace_back(q.x, q.y);
  for (const Ring& h : holes) {
    auto& inner = out.inners().emplace_back();
    for (const Point& q : h) inner.emplace_back(q.x, q.y);
  }
  return out;
}

PlanarPolygon to_boost(const GeoPolygon& p) {
  return to_boost(p.exterior(), p.holes());
}

GeoPolygon project_polygon(const GeoPolygon& p, const LocalFrame& frame) {
  if (frame.crs() != Crs::Geographic) return p;
  auto map_ring = [&](const Ring& r) { return frame.project_ring(r); };
  std::vector<Ring> holes;
  holes.reserve(p.holes().size());
  for (const Ring& h : p.holes()) holes.push_back(map_ring(h));
  const Crs crs = p.crs() == Crs::Geographic ? Crs::Planar : p.crs();
  return repair(map_ring(p.exterior()), std::move(holes), crs).polygon;
}

double area_of(const PlanarMultiPolygon& mp) {
  double a = 0.0;
  for (const auto& p : mp) a += bg::area(p);
  return a;
}

namespace {

PlanarMultiPolygon union_range(std::vector<PlanarPolygon>& polys,
                               std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return PlanarMultiPolygon{polys[lo]};
  const std::size_t mid = lo + (hi - lo) / 2;
  PlanarMultiPolygon left = union_range(polys, lo, mid);
  PlanarMultiPolygon right = union_range(polys, mid, hi);
  PlanarMultiPolygon out;
  bg::union_(left, right, out);
  return out;
}

}  // namespace

PlanarMultiPolygon union_all(std::vector<PlanarPolygon> polys) {
  if (polys.empty()) return {};
  return union_range(polys, 0, polys.size());
}

}  // namespace gba
