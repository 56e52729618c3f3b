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
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gba/fusion.hpp"
#include "gba/lod1.hpp"
#include "gba/raster.hpp"

namespace gba {

struct RegionStats {
  std::string region_id;
  std::uint64_t building_count = 0;
  double total_area_m2 = 0.0;
  double total_volume_m3 = 0.0;
  std::optional<double> population;
  std::optional<double> gdp_per_capita;

  /// Throws ValidationError on negative totals or population.
  void validate() const;
};

/// Sums records per footprint admin_id. Records without an admin_id are
/// grouped under the empty id. Sorted by region_id.
std::vector<RegionStats> aggregate_by_region(const std::vector<Lod1Record>& records);

struct VolumeGrid {
  RasterGrid grid;
  std::size_t outside = 0;  // records whose centroid fell off the extent
};

inline constexpr double kVolumeCellM = 480.0;

/// Sums record volumes into square cells attributed by footprint centroid.
/// Geographic footprints are gridded on the global cylindrical equal-area
/// plane, planar ones in their own plane. Cell edges sit on multiples of
/// cell_m. Without an extent the grid spans the records (one empty cell
/// for empty input).
VolumeGrid grid_volume(const std::vector<Lod1Record>& records, double cell_m = kVolumeCellM,
                       std::optional<Box> extent = std::nullopt);

enum class RatioPolicy { GlobalAverage, MaxRatio, MinRatio };

inline constexpr double kGlobalAverageNRatio = 1.03;

/// Sum of count / ratio. Continents without a ratio are divided by the
/// ratio the policy picks among the known ones (or the global average).
double extrapolate_count(const std::map<Continent, double>& counts,
                         const std::map<Continent, double>& ratios, RatioPolicy policy,
                         double global_average = kGlobalAverageNRatio);

struct CountEstimate {
  double point = 0.0;
  double low = 0.0;
  double high = 0.0;
};

/// Point estimate with the global-average ratio for unknown continents,
/// bounds with the largest (low) and smallest (high) known ratio. Throws
/// MissingInput when counts or ratios are missing, ValidationError on
/// non-positive ratios or negative counts.
CountEstimate estimate_global_count(const std::map<Continent, double>& counts,
                                    const std::map<Continent, double>& ratios,
                                    double global_average = kGlobalAverageNRatio);

struct RegressionResult {
  double slope = 0.0;
  double intercept = 0.0;
  double pearson_r = 0.0;
  double spearman_rho = 0.0;
  std::size_t n = 0;
  std::size_t excluded = 0;  // pairs dropped for a zero value
};

/// Ranks starting at 1; tied values share their mean rank.
std::vector<double> mean_ranks(std::span<const double> v);
/// nullopt when either series has zero variance or fewer than 2 values.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

/// Least squares of ln y on ln x. Pairs with a zero on either side are
/// dropped and counted; negative values throw ValidationError. nullopt for
/// fewer than 2 remaining pairs or a degenerate series.
std::optional<RegressionResult> loglog_regression(std::span<const double> x,
                                                  std::span<const double> y);

struct PerCapitaRow {
  std::string region_id;
  double volume_per_capita = 0.0;
  double area_per_capita = 0.0;
};

struct PerCapitaTable {
  std::vector<PerCapitaRow> rows;
  std::vector<std::string> excluded;  // no or zero population
};

PerCapitaTable per_capita_indicators(const std::vector<RegionStats>& stats);

struct RankingAgreement {
  std::uint64_t pairs = 0;
  std::uint64_t agreements = 0;
  [[nodiscard]] double rate() const {
    return pairs == 0 ? 0.0 : static_cast<double>(agreements) / static_cast<double>(pairs);
  }
};

/// Over all unordered region pairs, counts those ordered the same way by
/// both series. A tie on either side is a disagreement. Throws
/// ValidationError for mismatched lengths or fewer than 2 regions.
RankingAgreement ranking_agreement(std::span<const double> indicator,
                                   std::span<const double> reference);

struct AgreementDecomposition {
  std::uint64_t pairs = 0;
  std::uint64_t both = 0;
  std::uint64_t only_a = 0;
  std::uint64_t only_b = 0;
  std::uint64_t neither = 0;

  [[nodiscard]] std::uint64_t total_a() const { return both + only_a; }
  [[nodiscard]] std::uint64_t total_b() const { return both + only_b; }
  [[nodiscard]] double rate_a() const;
  [[nodiscard]] double rate_b() const;
};

AgreementDecomposition agreement_decomposition(std::span<const double> a,
                                               std::span<const double> b,
                                               std::span<const double> reference);

}  // namespace gba
