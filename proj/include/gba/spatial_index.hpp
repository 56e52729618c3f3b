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

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "gba/geometry.hpp"

namespace gba {

/// Read-only R-tree over bounding boxes (native coordinates). Queries
/// return indices into the box list the index was built from, sorted
/// ascending so results never depend on tree layout.
class SpatialIndex {
 public:
  SpatialIndex();
  explicit SpatialIndex(std::span<const Box> boxes);
  explicit SpatialIndex(std::span<const FootprintRecord> records);
  explicit SpatialIndex(std::span<const GeoPolygon> polygons);
  ~SpatialIndex();
  SpatialIndex(SpatialIndex&&) noexcept;
  SpatialIndex& operator=(SpatialIndex&&) noexcept;

  /// Indices whose box intersects `query` (touching counts).
  [[nodiscard]] std::vector<std::size_t> query(const Box& query) const;
  [[nodiscard]] std::size_t size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gba
