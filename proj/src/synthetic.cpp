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
#include "gba/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "gba/error.hpp"

namespace gba {

GeoPolygon pixel_rectangle(const GridSpec& g, int row0, int col0, int rows, int cols) {
  const double x0 = g.origin_x + col0 * g.pixel_w;
  const double x1 = g.origin_x + (col0 + cols) * g.pixel_w;
  const double y0 = g.origin_y - (row0 + rows) * g.pixel_h;
  const double y1 = g.origin_y - row0 * g.pixel_h;
  return GeoPolygon::rectangle(x0, y0, x1, y1, g.crs);
}

std::vector<FootprintRecord> make_town(std::uint64_t seed, const TownOptions& o) {
  o.lattice.validate();
  if (o.min_side_px < 1 || o.max_side_px < o.min_side_px || o.gap_px < 0) {
    throw ValidationError("invalid town building size range");
  }
  const int width = o.col_limit > 0 ? std::min(o.col_limit, o.lattice.width) : o.lattice.width;
  const int height = o.lattice.height;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> side(o.min_side_px, o.max_side_px);
  std::uniform_real_distribution<double> hdist(o.min_height_m, o.max_height_m);
  std::vector<unsigned char> used(static_cast<std::size_t>(width) * height, 0);

  std::vector<FootprintRecord> out;
  const int attempts = 50 * std::max(o.count, 1);
  for (int a = 0; a < attempts && static_cast<int>(out.size()) < o.count; ++a) {
    const int w = side(rng);
    const int h = side(rng);
    if (w > width || h > height) continue;
    const int c0 = std::uniform_int_distribution<int>(0, width - w)(rng);
    const int r0 = std::uniform_int_distribution<int>(0, height - h)(rng);
    const double hm = hdist(rng);
    bool free = true;
    for (int r = std::max(0, r0 - o.gap_px); free && r < std::min(height, r0 + h + o.gap_px); ++r) {
      for (int c = std::max(0, c0 - o.gap_px); c < std::min(width, c0 + w + o.gap_px); ++c) {
        if (used[static_cast<std::size_t>(r) * width + c]) {
          free = false;
          break;
        }
      }
    }
    if (!free) continue;
    for (int r = r0; r < r0 + h; ++r) {
      for (int c = c0; c < c0 + w; ++c) used[static_cast<std::size_t>(r) * width + c] = 1;
    }
    const double step = o.height_step_m > 0.0 ? o.height_step_m : 1.0;
    FootprintRecord rec{fmt::format("{}_{:05d}", o.id_prefix, out.size()),
                        pixel_rectangle(o.lattice, r0, c0, h, w), o.source, "",
                        std::max(0.0, std::round(hm / step) * step), std::nullopt};
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace gba
