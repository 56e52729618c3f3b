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
#include "gba/spatial_index.hpp"

#include <algorithm>
#include <utility>

#include <boost/geometry/index/rtree.hpp>

#include "gba/planar.hpp"

namespace gba {

namespace bgi = boost::geometry::index;

struct SpatialIndex::Impl {
  using Value = std::pair<PlanarBox, std::size_t>;
  bgi::rtree<Value, bgi::rstar<16>> tree;
  std::size_t count = 0;
};

namespace {

PlanarBox to_box(const Box& b) {
  return {{b.min_x, b.min_y}, {b.max_x, b.max_y}};
}

}  // namespace

SpatialIndex::SpatialIndex() : impl_(std::make_unique<Impl>()) {}

SpatialIndex::SpatialIndex(std::span<const Box> boxes)
    : impl_(std::make_unique<Impl>()) {
  std::vector<Impl::Value> values;
  values.reserve(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    values.emplace_back(to_box(boxes[i]), i);
  }
  // Packing constructor (bulk load).
  impl_->tree = decltype(impl_->tree)(values.begin(), values.end());
  impl_->count = boxes.size();
}

namespace {

template <typename T, typename F>
std::vector<Box> boxes_of(std::span<const T> items, F&& get) {
  std::vector<Box> out;
  out.reserve(items.size());
  for (const T& it : items) out.push_back(get(it));
  return out;
}

}  // namespace

SpatialIndex::SpatialIndex(std::span<const FootprintRecord> records)
    : SpatialIndex(std::span<const Box>(boxes_of(
          records, [](const FootprintRecord& r) { return r.geometry.bbox(); }))) {}

SpatialIndex::SpatialIndex(std::span<const GeoPolygon> polygons)
    : SpatialIndex(std::span<const Box>(
          boxes_of(polygons, [](const GeoPolygon& p) { return p.bbox(); }))) {}

SpatialIndex::~SpatialIndex() = default;
SpatialIndex::SpatialIndex(SpatialIndex&&) noexcept = default;
SpatialIndex& SpatialIndex::operator=(SpatialIndex&&) noexcept = default;

std::vector<std::size_t> SpatialIndex::query(const Box& q) const {
  std::vector<Impl::Value> hits;
  impl_->tree.query(bgi::intersects(to_box(q)), std::back_inserter(hits));
  std::vector<std::size_t> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(h.second);
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t SpatialIndex::size() const { return impl_->count; }

}  // namespace gba
