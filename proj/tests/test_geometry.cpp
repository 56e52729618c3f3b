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
#include <cmath>
#include <random>

#include "doctest.h"

#include "gba/error.hpp"
#include "gba/geometry.hpp"
#include "gba/planar.hpp"
#include "gba/spatial_index.hpp"
#include "support.hpp"

using namespace gba;

namespace {

// Star-shaped simple polygon around (cx, cy).
GeoPolygon star(std::mt19937_64& rng, double cx, double cy, double r0, double r1, int n,
                Crs crs = Crs::Planar) {
  std::uniform_real_distribution<double> rad(r0, r1);
  Ring ring;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * kPi * i / n;
    const double r = rad(rng);
    ring.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
  }
  ring.push_back(ring.front());
  return GeoPolygon::make(ring, {}, crs);
}

}  // namespace

TEST_CASE("polygon construction normalises and validates") {
  // Clockwise, unclosed, with a repeated vertex.
  const auto p = GeoPolygon::make({{0, 0}, {0, 2}, {0, 2}, {3, 2}, {3, 0}}, {}, Crs::Planar);
  CHECK(p.exterior().front() == p.exterior().back());
  CHECK(p.exterior().size() == 5);
  CHECK(signed_area(p.exterior()) > 0.0);
  CHECK(polygon_area_m2(p) == doctest::Approx(6.0));

  CHECK_THROWS_AS(GeoPolygon::make({{0, 0}, {1, 1}, {0, 0}}), InvalidGeometry);
  CHECK_THROWS_AS(GeoPolygon::make({{0, 0}, {1, 0}, {2, 0}, {0, 0}}), InvalidGeometry);
  // Bow tie.
  CHECK_THROWS_AS(GeoPolygon::make({{0, 0}, {2, 2}, {2, 0}, {0, 2}, {0, 0}}, {}, Crs::Planar),
                  InvalidGeometry);
  // Hole outside the shell.
  CHECK_THROWS_AS(GeoPolygon::make({{0, 0}, {4, 0}, {4, 4}, {0, 4}},
                                   {{{5, 5}, {6, 5}, {6, 6}, {5, 6}}}, Crs::Planar),
                  InvalidGeometry);
}

TEST_CASE("holes reduce area and containment") {
  const auto p = GeoPolygon::make({{0, 0}, {10, 0}, {10, 10}, {0, 10}},
                                  {{{2, 2}, {4, 2}, {4, 4}, {2, 4}}}, Crs::Planar);
  CHECK(polygon_area_m2(p) == doctest::Approx(96.0));
  CHECK(signed_area(p.holes()[0]) < 0.0);
  CHECK_FALSE(p.contains({3, 3}));
  CHECK(p.contains({5, 5}));
  CHECK(polygon_perimeter_m(p) == doctest::Approx(48.0));
}

TEST_CASE("repair rebuilds a bow tie and keeps the larger lobe") {
  const auto r = repair({{0, 0}, {4, 4}, {4, 0}, {0, 3}, {0, 0}}, {}, Crs::Planar);
  CHECK(r.repaired);
  CHECK(polygon_area_m2(r.polygon) > 0.0);
  const auto ok = repair({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {}, Crs::Planar);
  CHECK_FALSE(ok.repaired);
}

TEST_CASE("geographic area matches the spherical band formula") {
  const auto cell = GeoPolygon::rectangle(10.0, 0.0, 11.0, 1.0);
  const double expected = kEarthRadiusM * kEarthRadiusM * kDegToRad *
                          (std::sin(1.0 * kDegToRad) - std::sin(0.0));
  CHECK(polygon_area_m2(cell) == doctest::Approx(expected).epsilon(1e-6));

  // Equal-area: the same 0.001 degree cell shrinks with cos(latitude).
  const auto north = GeoPolygon::rectangle(11.0, 60.0, 11.001, 60.001);
  const double band = kEarthRadiusM * kEarthRadiusM * 0.001 * kDegToRad *
                      (std::sin(60.001 * kDegToRad) - std::sin(60.0 * kDegToRad));
  CHECK(polygon_area_m2(north) == doctest::Approx(band).epsilon(1e-9));
}

TEST_CASE("area agrees with a Monte Carlo estimate on random star polygons") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const GeoPolygon p = star(rng, 50, 50, 10, 40, 5 + t);
    const Box& b = p.bbox();
    const int n = 40000;
    int in = 0;
    for (int i = 0; i < n; ++i) {
      in += p.contains({b.min_x + u(rng) * (b.max_x - b.min_x),
                        b.min_y + u(rng) * (b.max_y - b.min_y)})
                ? 1
                : 0;
    }
    const double box_area = (b.max_x - b.min_x) * (b.max_y - b.min_y);
    const double frac = static_cast<double>(in) / n;
    const double sigma = box_area * std::sqrt(frac * (1 - frac) / n);
    CHECK(std::abs(polygon_area_m2(p) - frac * box_area) < 5.0 * sigma);
  }
}

TEST_CASE("intersection area and IoU of rectangles") {
  const auto a = GeoPolygon::rectangle(0, 0, 2, 2, Crs::Planar);
  const auto b = GeoPolygon::rectangle(1, 0, 3, 2, Crs::Planar);
  CHECK(intersection_area_m2(a, b) == doctest::Approx(2.0));
  CHECK(polygon_iou(a, b) == doctest::Approx(1.0 / 3.0));
  CHECK(polygon_iou(a, a) == doctest::Approx(1.0));
  CHECK(polygon_iou(a, GeoPolygon::rectangle(5, 5, 6, 6, Crs::Planar)) == 0.0);
  CHECK_THROWS_AS(intersection_area_m2(a, GeoPolygon::rectangle(0, 0, 1, 1)), CrsMismatch);

  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> c(0, 20);
  for (int i = 0; i < 200; ++i) {
    int x0 = c(rng), x1 = c(rng), y0 = c(rng), y1 = c(rng);
    int u0 = c(rng), u1 = c(rng), v0 = c(rng), v1 = c(rng);
    if (x0 == x1 || y0 == y1 || u0 == u1 || v0 == v1) continue;
    const auto p = GeoPolygon::rectangle(std::min(x0, x1), std::min(y0, y1), std::max(x0, x1),
                                         std::max(y0, y1), Crs::Planar);
    const auto q = GeoPolygon::rectangle(std::min(u0, u1), std::min(v0, v1), std::max(u0, u1),
                                         std::max(v0, v1), Crs::Planar);
    const double expect = test::rect_overlap(test::rect_of(p), test::rect_of(q));
    CHECK(intersection_area_m2(p, q) == doctest::Approx(expect));
  }
}

TEST_CASE("translation keeps shape") {
  const auto p = GeoPolygon::rectangle(0, 0, 2, 3, Crs::Planar).translated(10, -4);
  CHECK(p.bbox() == Box{10, -4, 12, -1});
  CHECK(polygon_area_m2(p) == doctest::Approx(6.0));
  const Point c = p.centroid();
  CHECK(c.x == doctest::Approx(11.0));
  CHECK(c.y == doctest::Approx(-2.5));
}

TEST_CASE("source names") {
  CHECK(source_from_string("osm") == Source::OSM);
  CHECK(source_from_string("Microsoft") == Source::Microsoft);
  CHECK(source_from_string("google") == Source::OpenBuildings);
  CHECK(source_from_string("something else") == Source::Other);
  CHECK(source_rank(Source::OSM) < source_rank(Source::Other));
  FootprintRecord r{"x", GeoPolygon::rectangle(0, 0, 1, 1), Source::Other, "cadastre", {}, {}};
  CHECK(r.source_name() == "cadastre");
  CHECK(crs_from_string(to_string(Crs::EqualAreaCylindrical)) == Crs::EqualAreaCylindrical);
}

TEST_CASE("LAEA projection round-trips and CEA is equal-area") {
  const LaeaProjection laea(11.5, 48.1);
  for (Point p : {Point{11.5, 48.1}, Point{12.3, 47.2}, Point{9.0, 50.5}}) {
    const Point back = laea.inverse(laea.forward(p));
    CHECK(back.x == doctest::Approx(p.x).epsilon(1e-12));
    CHECK(back.y == doctest::Approx(p.y).epsilon(1e-12));
  }
  const Point a = cea_forward({0.0, 0.0});
  const Point b = cea_forward({1.0, 1.0});
  const double area = (b.x - a.x) * (b.y - a.y);
  CHECK(area == doctest::Approx(polygon_area_m2(GeoPolygon::rectangle(0, 0, 1, 1))).epsilon(1e-6));
}

TEST_CASE("spatial index equals an exhaustive bbox scan") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  std::uniform_real_distribution<double> s(1.0, 40.0);
  std::vector<Box> boxes;
  for (int i = 0; i < 2000; ++i) {
    const double x = u(rng);
    const double y = u(rng);
    boxes.push_back({x, y, x + s(rng), y + s(rng)});
  }
  const SpatialIndex index{std::span<const Box>(boxes)};
  CHECK(index.size() == boxes.size());
  for (int q = 0; q < 200; ++q) {
    const double x = u(rng);
    const double y = u(rng);
    const Box query{x, y, x + 3 * s(rng), y + 3 * s(rng)};
    std::vector<std::size_t> expect;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      if (boxes[i].intersects(query)) expect.push_back(i);
    }
    CHECK(index.query(query) == expect);
  }
}
