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

#include <optional>
#include <string>
#include <vector>

#include "gba/geometry.hpp"
#include "gba/lod1.hpp"
#include "gba/raster.hpp"

namespace gba {

struct MatchPair {
  std::size_t pred = 0;  // index into the prediction list
  std::size_t gt = 0;    // index into the reference list
  std::string pred_id;
  std::string gt_id;
  double overlap_m2 = 0.0;
  double iou = 0.0;
};

struct MatchResult {
  std::vector<MatchPair> pairs;  // in assignment order
  std::vector<std::string> unmatched_pred;
  std::vector<std::string> unmatched_gt;
};

/// Greedy one-to-one assignment in descending overlap area, ties broken by
/// (pred_id, gt_id). Pairs without positive overlap are never matched.
MatchResult match_max_overlap(const std::vector<FootprintRecord>& pred,
                              const std::vector<FootprintRecord>& gt);

/// Pixel IoU of a predicted building mask against rasterised reference
/// polygons on a grid of `resolution_m` metres over the mask extent. The
/// mask is resampled (nearest) unless it already has that resolution.
/// Returns 1 when both sides are empty.
double raster_iou(const RasterGrid& pred_mask, const std::vector<FootprintRecord>& gt,
                  double resolution_m = 3.0);

enum class ApProtocol {
  /// Precision of the full prediction set (score-free products).
  SinglePoint,
  /// All-point interpolated AP with footprint area as pseudo-confidence.
  AreaRanked,
};

inline constexpr double kTruePositiveIou = 0.5;

/// TP = matched pairs with IoU >= 0.5. nullopt when the prediction set is
/// empty (AP) or the reference set is empty (AR).
std::optional<double> ap50(const std::vector<FootprintRecord>& pred,
                           const std::vector<FootprintRecord>& gt,
                           const MatchResult& match,
                           ApProtocol protocol = ApProtocol::SinglePoint);
std::optional<double> ar50(const std::vector<FootprintRecord>& gt,
                           const MatchResult& match);

/// |pred| / |gt|; nullopt for an empty reference.
std::optional<double> n_ratio(std::size_t pred_count, std::size_t gt_count);

struct ErrorPair {
  double rmse = 0.0;
  double mae = 0.0;
};

struct VolumeGridOptions {
  double pixel_m = 1.0;  // rasterisation resolution
  double cell_m = 10.0;  // aggregation cell, an integer multiple of pixel_m
};

/// Per-cell building volume error in m^3 per 100 m^2. Both sets are
/// burnt as prisms (height_m, missing = 0; the tallest wins where prisms
/// overlap) onto a pixel_m grid spanning their joint extent, summed into
/// cell_m cells, and compared over every cell of that extent.
ErrorPair volume_error(const std::vector<FootprintRecord>& pred,
                       const std::vector<FootprintRecord>& gt,
                       const VolumeGridOptions& opts = {});

/// Raster product variant: each native cell holds mean height x built
/// fraction x cell area (built fraction 1 when absent). Reference volume
/// per cell is integrated on a ~1 m sub-sample grid. Errors are scaled to
/// m^3 per 100 m^2.
ErrorPair volume_error(const RasterGrid& pred_height, const RasterGrid* built_fraction,
                       const std::vector<FootprintRecord>& gt);

/// Over matched pairs where both heights are present; nullopt if none.
std::optional<ErrorPair> height_error(const std::vector<FootprintRecord>& pred,
                                      const std::vector<FootprintRecord>& gt,
                                      const MatchResult& match);

/// Share of reference buildings matched to a prediction whose height is at
/// least min_h; nullopt for an empty reference.
std::optional<double> completeness(const std::vector<FootprintRecord>& pred,
                                   const std::vector<FootprintRecord>& gt,
                                   const MatchResult& match,
                                   double min_h = kMinValidHeightM);

struct EvalReport {
  std::string city;
  std::string product;
  std::optional<double> iou;
  std::optional<double> ap50;
  std::optional<double> ar50;
  std::optional<double> n_ratio;
  std::optional<double> rmse_bv;
  std::optional<double> mae_bv;
  std::optional<double> rmse_bh;
  std::optional<double> mae_bh;
  std::optional<double> completeness;

  static std::string csv_header();
  [[nodiscard]] std::string csv_row() const;
};

struct EvalOptions {
  double iou_resolution_m = 3.0;
  VolumeGridOptions volume;
  double min_height_m = kMinValidHeightM;
  ApProtocol protocol = ApProtocol::SinglePoint;
};

/// Full metric bundle for one (city, product). IoU rasterises both sets at
/// iou_resolution_m on their joint extent.
EvalReport evaluate(const std::vector<FootprintRecord>& pred,
                    const std::vector<FootprintRecord>& gt,
                    const EvalOptions& opts = {});

/// Converts LoD1 output into footprints carrying height_m.
std::vector<FootprintRecord> to_footprints(const std::vector<Lod1Record>& records);

}  // namespace gba
