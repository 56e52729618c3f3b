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
#include <filesystem>
#include <vector>

#include "gba/geometry.hpp"
#include "gba/raster.hpp"

namespace gba::io {

struct FixtureCity {
  std::filesystem::path config;  // demo.toml
  GridSpec grid;                 // 3 m-class probability / height grid
  std::vector<FootprintRecord> reference;
};

/// Fixture grid: about 1.2 x 0.9 km of geographic pixels near Munich.
GridSpec fixture_grid();

/// Writes a small synthetic city into `dir`: reference and per-source
/// footprints, admin units, probability scenes with a scene table, a
/// built-up mask, four TTA height rasters, population, continental counts
/// and N-ratios, plus demo.toml tying them together.
FixtureCity write_fixture_city(const std::filesystem::path& dir, std::uint64_t seed = 7);

}  // namespace gba::io
