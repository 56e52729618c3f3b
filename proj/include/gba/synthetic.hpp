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

#include <cstdint>
#include <string>
#include <vector>

#include "gba/geometry.hpp"
#include "gba/raster.hpp"

namespace gba {

/// Rectangle covering pixel rows [row0, row0 + rows) and columns
/// [col0, col0 + cols) of the grid, with corners computed exactly as the
/// tracer computes them.
GeoPolygon pixel_rectangle(const GridSpec& g, int row0, int col0, int rows, int cols);

struct TownOptions {
  GridSpec lattice;  // buildings snap to its pixel corners and stay inside it
  int count = 100;
  int min_side_px = 3;
  int max_side_px = 10;
  int gap_px = 1;  // empty pixels kept between buildings
  int col_limit = -1;  // exclusive column bound, -1 for the grid width
  double min_height_m = 3.0;
  double max_height_m = 40.0;
  double height_step_m = 0.25;
  Source source = Source::Other;
  std::string id_prefix = "b";
};

/// Non-overlapping axis-aligned buildings placed by rejection sampling.
/// May return fewer than `count` when the lattice fills up. Ids are
/// "<prefix>_<n:05>" in placement order.
std::vector<FootprintRecord> make_town(std::uint64_t seed, const TownOptions& opts);

}  // namespace gba
