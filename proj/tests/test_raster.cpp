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
#include <random>

#include "doctest.h"

#include "gba/error.hpp"
#include "gba/raster.hpp"
#include "gba/raster_ops.hpp"
#include "support.hpp"

using namespace gba;

namespace {

RasterGrid random_mask(std::uint64_t seed, int w, int h, double p) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution b(p);
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (auto& x : v) x = b(rng) ? 1.0 : 0.0;
  return RasterGrid(GridSpec{0, static_cast<double>(h), 1, 1, w, h, Crs::Planar},
                    Semantic::BinaryMask, 0.0, std::move(v));
}

}  // namespace

TEST_CASE("grid geometry") {
  const GridSpec g{100, 200, 2, 3, 10, 5, Crs::Planar};
  CHECK(g.center({0, 0}) == Point{101, 198.5});
  CHECK(g.bounds() == Box{100, 185, 120, 200});
  CHECK(g.cell_of({100, 200})->row == 0);
  CHECK(g.cell_of({119.999, 185.001})->col == 9);
  CHECK_FALSE(g.cell_of({120, 190}).has_value());
  CHECK_FALSE(g.cell_of({110, 185}).has_value());
  CHECK_THROWS_AS((GridSpec{0, 0, 0, 1, 1, 1}.validate()), InvalidGrid);
  CHECK_THROWS_AS((GridSpec{0, 0, 1, 1, 0, 1}.validate()), InvalidGrid);
}

TEST_CASE("geographic pixel areas sum to the band area") {
  const GridSpec g{11.0, 48.2, 0.001, 0.001, 10, 20, Crs::Geographic};
  double sum = 0.0;
  for (int r = 0; r < g.height; ++r) sum += g.pixel_area_m2(r) * g.width;
  const auto band = GeoPolygon::rectangle(11.0, 48.18, 11.01, 48.2);
  CHECK(sum == doctest::Approx(polygon_area_m2(band)).epsilon(1e-6));
}

TEST_CASE("semantic value checks") {
  const GridSpec g{0, 2, 1, 1, 2, 2, Crs::Planar};
  CHECK_NOTHROW(RasterGrid(g, Semantic::Probability, -1, {0.0, 0.5, 1.0, -1.0}));
  CHECK_THROWS_AS(RasterGrid(g, Semantic::Probability, -1, {0.0, 0.5, 1.2, 0.0}),
                  ValidationError);
  CHECK_THROWS_AS(RasterGrid(g, Semantic::BinaryMask, 255, {0.0, 0.5, 1.0, 0.0}),
                  ValidationError);
  CHECK_THROWS_AS(RasterGrid(g, Semantic::VarianceM2, -1, {0.0, -0.5, 1.0, 0.0}),
                  ValidationError);
  CHECK_THROWS_AS(RasterGrid(g, Semantic::HeightMeters, -1, {0.0, 1.0}), ValidationError);
  const RasterGrid nan_nodata(g, Semantic::HeightMeters, std::nan(""), {1.0, std::nan(""), 2, 3});
  CHECK_FALSE(nan_nodata.valid(0, 1));
  CHECK(nan_nodata.valid(0, 0));
  CHECK_THROWS_AS(require_semantic(nan_nodata, Semantic::Probability), SemanticMismatch);
}

TEST_CASE("rasterize equals per-pixel point-in-polygon") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 60.0);
  const GridSpec g{0.0, 60.0, 1.0, 1.0, 60, 60, Crs::Planar};
  for (int t = 0; t < 30; ++t) {
    std::vector<GeoPolygon> polys;
    std::vector<double> vals;
    for (int i = 0; i < 6; ++i) {
      Ring ring;
      const double cx = u(rng);
      const double cy = u(rng);
      for (int k = 0; k < 7; ++k) {
        const double a = 2 * 3.14159265358979 * k / 7;
        const double r = 3 + u(rng) / 4;
        ring.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
      }
      polys.push_back(GeoPolygon::make(ring, {}, Crs::Planar));
      vals.push_back(1.0 + i);
    }
    const RasterGrid m = rasterize(std::span<const GeoPolygon>(polys), g);
    const auto expect = test::oracle_burn(polys, g);
    CHECK(std::vector<double>(m.values().begin(), m.values().end()) == expect);

    const RasterGrid h = rasterize(std::span<const GeoPolygon>(polys), g, vals,
                                   Semantic::HeightMeters, 0.0, -1.0);
    CHECK(std::vector<double>(h.values().begin(), h.values().end()) ==
          test::oracle_burn(polys, g, vals));
  }
}

TEST_CASE("covered cells of a pixel-aligned rectangle") {
  const GridSpec g{0, 10, 1, 1, 10, 10, Crs::Planar};
  const auto cells = covered_cells(GeoPolygon::rectangle(2, 3, 5, 5, Crs::Planar), g);
  CHECK(cells.size() == 6);
  CHECK(cells.front() == Cell{5, 2});
  CHECK(cells.back() == Cell{6, 4});
  CHECK_THROWS_AS(covered_cells(GeoPolygon::rectangle(2, 3, 5, 5), g), CrsMismatch);
}

TEST_CASE("dilation and erosion equal the brute-force window filters") {
  for (std::uint64_t s = 0; s < 12; ++s) {
    const RasterGrid m = random_mask(s, 37, 29, s % 3 == 0 ? 0.02 : 0.3);
    for (auto [rx, ry] : {std::pair{0, 0}, {1, 1}, {2, 1}, {0, 3}, {5, 4}}) {
      const RasterGrid d = dilate_pixels(m, rx, ry);
      CHECK(std::vector<double>(d.values().begin(), d.values().end()) ==
            test::oracle_dilate(m, rx, ry));
      const RasterGrid e = erode_pixels(m, rx, ry);
      CHECK(std::vector<double>(e.values().begin(), e.values().end()) ==
            test::oracle_erode(m, rx, ry));
    }
  }
}

TEST_CASE("radius to pixels rounds half up per axis") {
  const GridSpec g{0, 0, 30, 20, 10, 10, Crs::Planar};
  CHECK(radius_in_pixels(g, 250) == std::pair{8, 13});
  CHECK(radius_in_pixels(g, 45) == std::pair{2, 2});
  CHECK(radius_in_pixels(g, 0) == std::pair{0, 0});
  CHECK_THROWS_AS(radius_in_pixels(g, -1), ValidationError);
}

TEST_CASE("dilated mask contains the input") {
  const RasterGrid m = random_mask(9, 40, 40, 0.05);
  const RasterGrid d = dilate_mask(m, 3.0);
  for (std::size_t i = 0; i < m.values().size(); ++i) {
    if (m.values()[i] == 1.0) CHECK(d.values()[i] == 1.0);
  }
}

TEST_CASE("nearest resampling") {
  const GridSpec src{0, 4, 2, 2, 2, 2, Crs::Planar};
  const RasterGrid r(src, Semantic::HeightMeters, -1, {1, 2, 3, 4});
  const GridSpec fine{0, 4, 1, 1, 5, 4, Crs::Planar};
  const RasterGrid out = resample_nearest(r, fine, -1);
  CHECK(out.at(0, 0) == 1);
  CHECK(out.at(1, 3) == 2);
  CHECK(out.at(3, 0) == 3);
  CHECK(out.at(2, 2) == 4);
  CHECK(out.at(0, 4) == -1);
}
