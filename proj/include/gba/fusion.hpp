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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gba/geometry.hpp"

namespace gba {

enum class Continent { AS, AF, EU, NA, SA, OC };

std::string_view to_string(Continent c);
Continent continent_from_string(std::string_view name);

/// Administrative boundary used as the fusion work unit. Multi-part
/// geometries are stored as separate parts.
struct AdminUnit {
  std::string admin_id;
  std::vector<GeoPolygon> parts;
  Continent continent = Continent::EU;

  [[nodiscard]] bool contains(Point p) const;
  [[nodiscard]] Box bbox() const;
};

using SourceMap = std::map<Source, std::vector<FootprintRecord>>;

/// OSM outside South America and Africa, Open Buildings inside them; when
/// the preferred layer is missing, the first available source in
/// kSourceOrder.
Source select_base_source(const AdminUnit& unit, const std::set<Source>& available);

/// Share of primary building area covered by the union of the candidate
/// footprints. nullopt when the primary set has no area.
std::optional<double> recall_of(const std::vector<FootprintRecord>& primary,
                                const std::vector<FootprintRecord>& candidate);

/// Candidate area lying outside the union of the primary footprints, m^2.
double area_gain_of(const std::vector<FootprintRecord>& primary,
                    const std::vector<FootprintRecord>& candidate);

struct FusionScore {
  Source source = Source::Other;
  double recall = 0.0;
  double area_gain_m2 = 0.0;
  double combined = 0.0;
};

/// combined = 0.5 * recall + 0.5 * gain / max_gain (0 when every gain is 0).
/// Scores come back in kSourceOrder.
std::vector<FusionScore> score_candidates(const std::vector<FootprintRecord>& primary,
                                          const SourceMap& candidates);

/// Highest combined score; ties go to the earlier source in kSourceOrder.
/// Throws MissingInput when there are no candidates.
FusionScore select_secondary_source(const std::vector<FootprintRecord>& primary,
                                    const SourceMap& candidates);

/// All primary records plus every secondary record whose overlap with the
/// primary union, relative to its own area, is below overlap_thresh.
std::vector<FootprintRecord> merge(const std::vector<FootprintRecord>& primary,
                                   const std::vector<FootprintRecord>& secondary,
                                   double overlap_thresh = 0.1);

struct ContributionRow {
  std::string admin_id;
  std::string source;
  std::size_t count = 0;
  double area_m2 = 0.0;
};

struct FusionResult {
  std::vector<FootprintRecord> records;  // sorted by id, admin_id set
  std::vector<ContributionRow> report;   // one row per contributing source
  std::optional<Source> base;
  std::optional<FusionScore> secondary;
};

/// Base selection, secondary selection and merge for one unit. Records are
/// expected to be already assigned to the unit (see assign_to_units).
FusionResult fuse_admin(const AdminUnit& unit, const SourceMap& sources,
                        double overlap_thresh = 0.1);

/// Index of the unit whose geometry contains each record's centroid (first
/// match in unit order), or nullopt.
std::vector<std::optional<std::size_t>> assign_to_units(
    const std::vector<FootprintRecord>& records, const std::vector<AdminUnit>& units);

/// Per-record provenance tally of a fused record set.
std::vector<ContributionRow> tally_contributions(
    const std::string& admin_id, const std::vector<FootprintRecord>& records);

}  // namespace gba
