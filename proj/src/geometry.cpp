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
#include "gba/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>

#include "gba/error.hpp"
#include "gba/planar.hpp"

namespace gba {

std::string_view to_string(Crs crs) {
  switch (crs) {
    case Crs::Geographic:
      return "geographic";
    case Crs::Planar:
      return "planar";
    case Crs::EqualAreaCylindrical:
      return "cea";
  }
  return "geographic";
}

Crs crs_from_string(std::string_view name) {
  if (name == "geographic" || name == "wgs84" || name == "EPSG:4326") {
    return Crs::Geographic;
  }
  if (name == "planar" || name == "metric") return Crs::Planar;
  if (name == "cea") return Crs::EqualAreaCylindrical;
  throw ValidationError("unknown crs '" + std::string(name) + "'");
}

void Box::expand(const Box& other) {
  min_x = std::min(min_x, other.min_x);
  min_y = std::min(min_y, other.min_y);
  max_x = std::max(max_x, other.max_x);
  max_y = std::max(max_y, other.max_y);
}

void Box::expand(Point p) {
  min_x = std::min(min_x, p.x);
  min_y = std::min(min_y, p.y);
  max_x = std::max(max_x, p.x);
  max_y = std::max(max_y, p.y);
}

Box bbox_of(const Ring& ring) {
  Box b{std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity(),
        -std::numeric_limits<double>::infinity()};
  for (const Point& p : ring) b.expand(p);
  return b;
}

double signed_area(const Ring& ring) {
  if (ring.size() < 3) return 0.0;
  // Shift to the first vertex to keep the cross products well conditioned.
  const Point o = ring.front();
  double twice = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const double ax = ring[i].x - o.x;
    const double ay = ring[i].y - o.y;
    const double bx = ring[i + 1].x - o.x;
    const double by = ring[i + 1].y - o.y;
    twice += ax * by - bx * ay;
  }
  return 0.5 * twice;
}

namespace {

// Closes the ring and drops consecutive duplicates.
Ring tidy(Ring ring) {
  Ring out;
  out.reserve(ring.size() + 1);
  for (const Point& p : ring) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw InvalidGeometry("non-finite coordinate");
    }
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  }
  if (!out.empty() && !(out.front() == out.back())) out.push_back(out.front());
  return out;
}

Ring oriented(Ring ring, bool ccw) {
  const double a = signed_area(ring);
  if ((a > 0) != ccw) std::reverse(ring.begin(), ring.end());
  return ring;
}

std::string ring_problem(const Ring& ring) {
  if (ring.size() < 4) return "ring has fewer than 4 vertices";
  if (signed_area(ring) == 0.0) return "ring has zero area";
  return {};
}

}  // namespace

struct GeoPolygonAccess {
  static GeoPolygon build(Ring exterior, std::vector<Ring> holes, Crs crs) {
    GeoPolygon p;
    p.exterior_ = std::move(exterior);
    p.holes_ = std::move(holes);
    p.crs_ = crs;
    p.bbox_ = bbox_of(p.exterior_);
    return p;
  }
};

GeoPolygon GeoPolygon::make(Ring exterior, std::vector<Ring> holes, Crs crs) {
  exterior = tidy(std::move(exterior));
  if (auto why = ring_problem(exterior); !why.empty()) {
    throw InvalidGeometry("exterior: " + why);
  }
  exterior = oriented(std::move(exterior), true);
  for (Ring& h : holes) {
    h = tidy(std::move(h));
    if (auto why = ring_problem(h); !why.empty()) {
      throw InvalidGeometry("hole: " + why);
    }
    h = oriented(std::move(h), false);
  }
  GeoPolygon p =
      GeoPolygonAccess::build(std::move(exterior), std::move(holes), crs);
  bg::validity_failure_type failure;
  if (!bg::is_valid(to_boost(p), failure)) {
    throw InvalidGeometry(std::string("invalid polygon: ") +
                          bg::validity_failure_type_message(failure));
  }
  return p;
}

GeoPolygon GeoPolygon::rectangle(double min_x, double min_y, double max_x,
                                 double max_y, Crs crs) {
  return make({{min_x, min_y},
               {max_x, min_y},
               {max_x, max_y},
               {min_x, max_y},
               {min_x, min_y}},
              {}, crs);
}

Point GeoPolygon::centroid() const {
  const Point o = exterior_.front();
  double a2 = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  auto accumulate = [&](const Ring& r) {
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
      const double x0 = r[i].x - o.x;
      const double y0 = r[i].y - o.y;
      const double x1 = r[i + 1].x - o.x;
      const double y1 = r[i + 1].y - o.y;
      const double cross = x0 * y1 - x1 * y0;
      a2 += cross;
      cx += (x0 + x1) * cross;
      cy += (y0 + y1) * cross;
    }
  };
  accumulate(exterior_);
  for (const Ring& h : holes_) accumulate(h);
  if (a2 == 0.0) return bbox_.center();
  return {o.x + cx / (3.0 * a2), o.y + cy / (3.0 * a2)};
}

std::size_t GeoPolygon::vertex_count() const {
  std::size_t n = exterior_.size();
  for (const Ring& h : holes_) n += h.size();
  return n;
}

bool GeoPolygon::contains(Point p) const {
  if (p.x < bbox_.min_x || p.x > bbox_.max_x || p.y < bbox_.min_y ||
      p.y > bbox_.max_y) {
    return false;
  }
  bool inside = false;
  auto scan = [&](const Ring& r) {
    for (std::size_t i = 0, j = r.size() - 1; i < r.size(); j = i++) {
      const Point& a = r[i];
      const Point& b = r[j];
      if ((a.y > p.y) != (b.y > p.y)) {
        const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
        if (p.x < x) inside = !inside;
      }
    }
  };
  scan(exterior_);
  for (const Ring& h : holes_) scan(h);
  return inside;
}

GeoPolygon GeoPolygon::translated(double dx, double dy) const {
  auto shift = [&](Ring r) {
    for (Point& p : r) {
      p.x += dx;
      p.y += dy;
    }
    return r;
  };
  std::vector<Ring> holes;
  holes.reserve(holes_.size());
  for (const Ring& h : holes_) holes.push_back(shift(h));
  return GeoPolygonAccess::build(shift(exterior_), std::move(holes), crs_);
}

// ---------------------------------------------------------------------------
// Repair

namespace {

struct PointLess {
  bool operator()(const Point& a, const Point& b) const {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  }
};

// Inserts every segment/segment crossing as an explicit vertex.
Ring node_ring(const Ring& ring) {
  const std::size_t n = ring.size() - 1;
  std::vector<std::vector<std::pair<double, Point>>> splits(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = ring[i];
    const Point b = ring[i + 1];
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point c = ring[j];
      const Point d = ring[j + 1];
      const double rx = b.x - a.x;
      const double ry = b.y - a.y;
      const double sx = d.x - c.x;
      const double sy = d.y - c.y;
      const double denom = rx * sy - ry * sx;
      if (denom == 0.0) continue;
      const double qx = c.x - a.x;
      const double qy = c.y - a.y;
      const double t = (qx * sy - qy * sx) / denom;
      const double u = (qx * ry - qy * rx) / denom;
      if (t <= 0.0 || t >= 1.0 || u <= 0.0 || u >= 1.0) continue;
      const Point x{a.x + t * rx, a.y + t * ry};
      splits[i].emplace_back(t, x);
      splits[j].emplace_back(u, x);
    }
  }
  Ring out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(ring[i]);
    auto& s = splits[i];
    std::sort(s.begin(), s.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    for (const auto& [t, p] : s) out.push_back(p);
  }
  out.push_back(out.front());
  return out;
}

// Cuts a noded ring into loops at repeated vertices.
std::vector<Ring> split_loops(const Ring& noded) {
  std::vector<Ring> loops;
  std::vector<Point> path;
  std::map<Point, std::size_t, PointLess> where;
  for (std::size_t i = 0; i + 1 < noded.size(); ++i) {
    const Point p = noded[i];
    auto it = where.find(p);
    if (it != where.end()) {
      const std::size_t start = it->second;
      Ring loop(path.begin() + static_cast<std::ptrdiff_t>(start), path.end());
      loop.push_back(p);
      for (std::size_t k = start + 1; k < path.size(); ++k) where.erase(path[k]);
      path.resize(start + 1);
      loops.push_back(std::move(loop));
    } else {
      where.emplace(p, path.size());
      path.push_back(p);
    }
  }
  if (!path.empty()) {
    Ring loop(path.begin(), path.end());
    loop.push_back(path.front());
    loops.push_back(std::move(loop));
  }
  return loops;
}

}  // namespace

RepairResult repair(Ring exterior, std::vector<Ring> holes, Crs crs) {
  try {
    return {GeoPolygon::make(exterior, holes, crs), false};
  } catch (const InvalidGeometry&) {
  }

  std::vector<Ring> rings;
  rings.push_back(tidy(std::move(exterior)));
  for (Ring& h : holes) rings.push_back(tidy(std::move(h)));

  PlanarMultiPolygon acc;
  for (const Ring& r : rings) {
    if (r.size() < 4) continue;
    for (Ring& loop : split_loops(node_ring(r))) {
      if (loop.size() < 4 || signed_area(loop) == 0.0) continue;
      PlanarPolygon piece = to_boost(oriented(std::move(loop), true), {});
      bg::correct(piece);
      PlanarMultiPolygon next;
      bg::sym_difference(acc, piece, next);
      acc = std::move(next);
    }
  }
  if (acc.empty()) throw InvalidGeometry("polygon could not be repaired");

  const auto largest = std::max_element(
      acc.begin(), acc.end(),
      [](const auto& l, const auto& r) { return bg::area(l) < bg::area(r); });
  Ring ext;
  for (const auto& q : largest->outer()) ext.push_back({q.x(), q.y()});
  std::vector<Ring> hs;
  for (const auto& inner : largest->inners()) {
    Ring h;
    for (const auto& q : inner) h.push_back({q.x(), q.y()});
    hs.push_back(std::move(h));
  }
  return {GeoPolygon::make(std::move(ext), std::move(hs), crs), true};
}

// ---------------------------------------------------------------------------
// Metric measures

namespace {

LocalFrame frame_for(const GeoPolygon& p) {
  return LocalFrame(p.crs(), p.crs() == Crs::Geographic ? p.centroid()
                                                        : Point{0.0, 0.0});
}

double ring_length(const Ring& r, const LocalFrame& f) {
  double len = 0.0;
  Point prev = f.to_planar(r.front());
  for (std::size_t i = 1; i < r.size(); ++i) {
    const Point cur = f.to_planar(r[i]);
    len += std::hypot(cur.x - prev.x, cur.y - prev.y);
    prev = cur;
  }
  return len;
}

}  // namespace

double polygon_area_m2(const GeoPolygon& p) {
  if (p.crs() != Crs::Geographic) {
    double a = signed_area(p.exterior());
    for (const Ring& h : p.holes()) a += signed_area(h);
    return std::max(0.0, a);
  }
  return std::max(0.0, bg::area(frame_for(p).project(p)));
}

double polygon_perimeter_m(const GeoPolygon& p) {
  const LocalFrame f = frame_for(p);
  double len = ring_length(p.exterior(), f);
  for (const Ring& h : p.holes()) len += ring_length(h, f);
  return len;
}

namespace {

std::pair<double, double> overlap_and_union(const GeoPolygon& a,
                                            const GeoPolygon& b) {
  if (a.crs() != b.crs()) {
    throw CrsMismatch("polygons use different coordinate references");
  }
  if (!a.bbox().intersects(b.bbox())) {
    return {0.0, polygon_area_m2(a) + polygon_area_m2(b)};
  }
  Box joint = a.bbox();
  joint.expand(b.bbox());
  const LocalFrame f = LocalFrame::around(a.crs(), joint);
  const PlanarPolygon pa = f.project(a);
  const PlanarPolygon pb = f.project(b);
  PlanarMultiPolygon out;
  bg::intersection(pa, pb, out);
  const double inter = area_of(out);
  return {inter, bg::area(pa) + bg::area(pb) - inter};
}

}  // namespace

double intersection_area_m2(const GeoPolygon& a, const GeoPolygon& b) {
  return overlap_and_union(a, b).first;
}

double polygon_iou(const GeoPolygon& a, const GeoPolygon& b) {
  const auto [inter, uni] = overlap_and_union(a, b);
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Sources

int source_rank(Source s) {
  for (int i = 0; i < static_cast<int>(std::size(kSourceOrder)); ++i) {
    if (kSourceOrder[i] == s) return i;
  }
  return static_cast<int>(std::size(kSourceOrder));
}

std::string_view to_string(Source s) {
  switch (s) {
    case Source::OSM:
      return "OSM";
    case Source::OpenBuildings:
      return "OpenBuildings";
    case Source::Microsoft:
      return "Microsoft";
    case Source::CLSM:
      return "CLSM";
    case Source::PSRDerived:
      return "PSRDerived";
    case Source::Other:
      return "Other";
  }
  return "Other";
}

Source source_from_string(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "osm" || lower == "openstreetmap") return Source::OSM;
  if (lower == "openbuildings" || lower == "google" || lower == "ob") {
    return Source::OpenBuildings;
  }
  if (lower == "microsoft" || lower == "ms") return Source::Microsoft;
  if (lower == "clsm") return Source::CLSM;
  if (lower == "psrderived" || lower == "psr") return Source::PSRDerived;
  return Source::Other;
}

std::string FootprintRecord::source_name() const {
  if (source == Source::Other && !source_label.empty()) return source_label;
  return std::string(to_string(source));
}

}  // namespace gba
