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
#include "gba/lod1.hpp"

#include <algorithm>
#include <optional>

#include <tbb/parallel_for.h>

#include "gba/error.hpp"
#include "gba/raster_ops.hpp"

namespace gba {

PredictionStack::PredictionStack(std::vector<RasterGrid> layers)
    : layers_(std::move(layers)) {
  if (layers_.empty()) throw ValidationError("prediction stack is empty");
  if (layers_.size() > kMaxTtaLayers) {
    throw ValidationError("at most 4 predictions per pixel are supported");
  }
  for (const RasterGrid& l : layers_) {
    require_semantic(l, Semantic::HeightMeters);
    if (!l.spec().same_geometry(layers_.front().spec())) {
      throw GridMismatch("prediction layers do not share a grid");
    }
  }
  coverage_.assign(spec().size(), 0);
  for (const RasterGrid& l : layers_) {
    for (std::size_t i = 0; i < coverage_.size(); ++i) {
      if (!l.is_nodata(l.values()[i])) ++coverage_[i];
    }
  }
}

std::pair<RasterGrid, RasterGrid> tta_aggregate(const PredictionStack& stack) {
  const auto& layers = stack.layers();
  const double nodata = layers.front().nodata();
  const std::size_t n = stack.spec().size();
  std::vector<double> mean(n, nodata);
  std::vector<double> var(n, nodata);
  for (std::size_t i = 0; i < n; ++i) {
    // Welford update over the layers present at this pixel.
    int k = 0;
    double m = 0.0;
    double m2 = 0.0;
    for (const RasterGrid& l : layers) {
      const double v = l.values()[i];
      if (l.is_nodata(v)) continue;
      ++k;
      const double d = v - m;
      m += d / k;
      m2 += d * (v - m);
    }
    if (k == 0) continue;
    mean[i] = m;
    var[i] = k == 1 ? 0.0 : std::max(0.0, m2 / k);
  }
  return {RasterGrid(stack.spec(), Semantic::HeightMeters, nodata, std::move(mean)),
          RasterGrid(stack.spec(), Semantic::VarianceM2, nodata, std::move(var))};
}

Lod1Record assign_height(const FootprintRecord& footprint, const RasterGrid& height,
                         const RasterGrid& variance) {
  require_semantic(height, Semantic::HeightMeters);
  require_semantic(variance, Semantic::VarianceM2);
  if (!height.spec().same_geometry(variance.spec())) {
    throw GridMismatch("height and variance rasters do not share a grid");
  }
  Lod1Record rec{footprint, std::nullopt, std::nullopt, std::nullopt};
  std::vector<Cell> cells = covered_cells(footprint.geometry, height.spec());
  if (cells.empty()) {
    if (auto c = height.spec().cell_of(footprint.geometry.centroid())) {
      cells.push_back(*c);
    }
  }
  std::optional<Cell> best;
  double best_h = 0.0;
  for (const Cell& c : cells) {  // row-major, so strict > keeps the first
    const double v = height.at(c.row, c.col);
    if (height.is_nodata(v)) continue;
    const double h = std::max(0.0, v);
    if (!best || h > best_h) {
      best = c;
      best_h = h;
    }
  }
  if (!best) return rec;
  rec.height_m = best_h;
  rec.volume_m3 = polygon_area_m2(footprint.geometry) * best_h;
  const double u = variance.at(best->row, best->col);
  if (!variance.is_nodata(u)) rec.uncertainty_m2 = u;
  return rec;
}

Lod1Build build_lod1(const std::vector<FootprintRecord>& fused,
                     const RasterGrid& height, const RasterGrid& variance,
                     double min_h) {
  Lod1Build out;
  std::vector<std::optional<Lod1Record>> slots(fused.size());
  tbb::parallel_for(std::size_t{0}, fused.size(), [&](std::size_t i) {
    slots[i] = assign_height(fused[i], height, variance);
  });
  out.records.reserve(fused.size());
  std::size_t valid = 0;
  for (auto& r : slots) {
    out.records.push_back(std::move(*r));
    if (out.records.back().valid_height(min_h)) ++valid;
  }
  if (!fused.empty()) {
    out.completeness = static_cast<double>(valid) / static_cast<double>(fused.size());
  }
  return out;
}

}  // namespace gba
