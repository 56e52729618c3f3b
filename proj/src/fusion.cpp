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
#include "gba/fusion.hpp"

#include <algorithm>
#include <limits>
#include <utility>

#include <boost/geometry/index/rtree.hpp>

#include "gba/error.hpp"
#include "gba/planar.hpp"
#include "gba/spatial_index.hpp"

namespace gba {

namespace bgi = boost::geometry::index;

std::string_view to_string(Continent c) {
  switch (c) {
    case Continent::AS:
      return "AS";
    case Continent::AF:
      return "AF";
    case Continent::EU:
      return "EU";
    case Continent::NA:
      return "NA";
    case Continent::SA:
      return "SA";
    case Continent::OC:
      return "OC";
  }
  return "EU";
}

Continent continent_from_string(std::string_view name) {
  for (Continent c : {Continent::AS, Continent::AF, Continent::EU, Continent::NA,
                      Continent::SA, Continent::OC}) {
    if (to_string(c) == name) return c;
  }
  throw ValidationError("unknown continent '" + std::string(name) + "'");
}

bool AdminUnit::contains(Point p) const {
  return std::any_of(parts.begin(), parts.end(),
                     [&](const GeoPolygon& g) { return g.contains(p); });
}

Box AdminUnit::bbox() const {
  if (parts.empty()) return {};
  Box b = parts.front().bbox();
  for (const GeoPolygon& g : parts) b.expand(g.bbox());
  return b;
}

Source select_base_source(const AdminUnit& unit, const std::set<Source>& available) {
  if (available.empty()) throw MissingInput("no source available for base layer");
  const bool south = unit.continent == Continent::SA || unit.continent == Continent::AF;
  const Source preferred = south ? Source::OpenBuildings : Source::OSM;
  if (available.contains(preferred)) return preferred;
  for (Source s : kSourceOrder) {
    if (available.contains(s)) return s;
  }
  return *available.begin();
}

namespace {

// Footprints projected into one metric frame with an R-tree over them.
class ProjectedSet {
 public:
  ProjectedSet(const std::vector<FootprintRecord>& records, const LocalFrame& frame) {
    polys_.reserve(records.size());
    std::vector<std::pair<PlanarBox, std::size_t>> values;
    values.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
      polys_.push_back(frame.project(records[i].geometry));
      areas_.push_back(bg::area(polys_.back()));
      values.emplace_back(bg::return_envelope<PlanarBox>(polys_.back()), i);
    }
    tree_ = decltype(tree_)(values.begin(), values.end());
  }

  [[nodiscard]] const PlanarPolygon& polygon(std::size_t i) const { return polys_[i]; }
  [[nodiscard]] double area(std::size_t i) const { return areas_[i]; }
  [[nodiscard]] std::size_t size() const { return polys_.size(); }

  /// Area of `p` covered by the union of this set.
  [[nodiscard]] double covered_area(const PlanarPolygon& p) const {
    std::vector<std::pair<PlanarBox, std::size_t>> hits;
    tree_.query(bgi::intersects(bg::return_envelope<PlanarBox>(p)),
                std::back_inserter(hits));
    if (hits.empty()) return 0.0;
    std::sort(hits.begin(), hits.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    PlanarMultiPolygon inter;
    if (hits.size() == 1) {
      bg::intersection(p, polys_[hits.front().second], inter);
    } else {
      std::vector<PlanarPolygon> local;
      local.reserve(hits.size());
      for (const auto& h : hits) local.push_back(polys_[h.second]);
      bg::intersection(p, union_all(std::move(local)), inter);
    }
    return area_of(inter);
  }

 private:
  std::vector<PlanarPolygon> polys_;
  std::vector<double> areas_;
  bgi::rtree<std::pair<PlanarBox, std::size_t>, bgi::rstar<16>> tree_;
};

LocalFrame frame_for(const std::vector<const std::vector<FootprintRecord>*>& sets) {
  std::optional<Box> box;
  std::optional<Crs> crs;
  for (const auto* s : sets) {
    for (const FootprintRecord& r : *s) {
      if (crs && *crs != r.geometry.crs()) {
        throw CrsMismatch("footprints use different coordinate references");
      }
      crs = r.geometry.crs();
      if (box) {
        box->expand(r.geometry.bbox());
      } else {
        box = r.geometry.bbox();
      }
    }
  }
  return LocalFrame(crs.value_or(Crs::Planar), box ? box->center() : Point{});
}

double recall_in(const ProjectedSet& primary, const ProjectedSet& candidate,
                 double& total) {
  double covered = 0.0;
  total = 0.0;
  for (std::size_t i = 0; i < primary.size(); ++i) {
    total += primary.area(i);
    covered += candidate.covered_area(primary.polygon(i));
  }
  return covered;
}

double gain_in(const ProjectedSet& primary, const ProjectedSet& candidate) {
  double gain = 0.0;
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    gain += std::max(0.0, candidate.area(i) - primary.covered_area(candidate.polygon(i)));
  }
  return gain;
}

}  // namespace

std::optional<double> recall_of(const std::vector<FootprintRecord>& primary,
                                const std::vector<FootprintRecord>& candidate) {
  const LocalFrame f = frame_for({&primary, &candidate});
  const ProjectedSet p(primary, f);
  const ProjectedSet c(candidate, f);
  double total = 0.0;
  const double covered = recall_in(p, c, total);
  if (!(total > 0.0)) return std::nullopt;
  return std::clamp(covered / total, 0.0, 1.0);
}

double area_gain_of(const std::vector<FootprintRecord>& primary,
                    const std::vector<FootprintRecord>& candidate) {
  const LocalFrame f = frame_for({&primary, &candidate});
  return gain_in(ProjectedSet(primary, f), ProjectedSet(candidate, f));
}

std::vector<FusionScore> score_candidates(const std::vector<FootprintRecord>& primary,
                                          const SourceMap& candidates) {
  std::vector<const std::vector<FootprintRecord>*> sets{&primary};
  for (const auto& [src, recs] : candidates) sets.push_back(&recs);
  const LocalFrame f = frame_for(sets);
  const ProjectedSet p(primary, f);

  std::vector<FusionScore> scores;
  for (Source s : kSourceOrder) {
    auto it = candidates.find(s);
    if (it == candidates.end()) continue;
    const ProjectedSet c(it->second, f);
    double total = 0.0;
    const double covered = recall_in(p, c, total);
    FusionScore score;
    score.source = s;
    score.recall = total > 0.0 ? std::clamp(covered / total, 0.0, 1.0) : 0.0;
    score.area_gain_m2 = gain_in(p, c);
    scores.push_back(score);
  }
  double max_gain = 0.0;
  for (const FusionScore& s : scores) max_gain = std::max(max_gain, s.area_gain_m2);
  for (FusionScore& s : scores) {
    const double norm = max_gain > 0.0 ? s.area_gain_m2 / max_gain : 0.0;
    s.combined = 0.5 * s.recall + 0.5 * norm;
  }
  return scores;
}

FusionScore select_secondary_source(const std::vector<FootprintRecord>& primary,
                                    const SourceMap& candidates) {
  const auto scores = score_candidates(primary, candidates);
  if (scores.empty()) throw MissingInput("no candidate secondary source");
  // Scores are in kSourceOrder, so strict > keeps the earliest on ties.
  FusionScore best = scores.front();
  for (const FusionScore& s : scores) {
    if (s.combined > best.combined) best = s;
  }
  return best;
}

std::vector<FootprintRecord> merge(const std::vector<FootprintRecord>& primary,
                                   const std::vector<FootprintRecord>& secondary,
                                   double overlap_thresh) {
  if (!(overlap_thresh >= 0.0 && overlap_thresh <= 1.0)) {
    throw ValidationError("overlap threshold must be in [0, 1]");
  }
  std::vector<FootprintRecord> out = primary;
  if (secondary.empty()) return out;
  const LocalFrame f = frame_for({&primary, &secondary});
  const ProjectedSet p(primary, f);
  const ProjectedSet s(secondary, f);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double a = s.area(i);
    if (!(a > 0.0)) continue;
    if (p.covered_area(s.polygon(i)) / a < overlap_thresh) {
      out.push_back(secondary[i]);
    }
  }
  return out;
}

std::vector<ContributionRow> tally_contributions(
    const std::string& admin_id, const std::vector<FootprintRecord>& records) {
  std::map<std::string, ContributionRow> rows;
  for (const FootprintRecord& r : records) {
    auto& row = rows[r.source_name()];
    row.admin_id = admin_id;
    row.source = r.source_name();
    ++row.count;
    row.area_m2 += polygon_area_m2(r.geometry);
  }
  std::vector<ContributionRow> out;
  for (auto& [name, row] : rows) out.push_back(std::move(row));
  return out;
}

FusionResult fuse_admin(const AdminUnit& unit, const SourceMap& sources,
                        double overlap_thresh) {
  FusionResult result;
  std::set<Source> available;
  for (const auto& [src, recs] : sources) {
    if (!recs.empty()) available.insert(src);
  }
  if (available.empty()) return result;

  const Source base = select_base_source(unit, available);
  result.base = base;
  const auto& primary = sources.at(base);
  SourceMap candidates;
  for (Source s : available) {
    if (s != base) candidates.emplace(s, sources.at(s));
  }
  if (candidates.empty()) {
    result.records = primary;
  } else {
    result.secondary = select_secondary_source(primary, candidates);
    result.records = merge(primary, candidates.at(result.secondary->source),
                           overlap_thresh);
  }
  for (FootprintRecord& r : result.records) r.admin_id = unit.admin_id;
  std::sort(result.records.begin(), result.records.end(),
            [](const FootprintRecord& a, const FootprintRecord& b) { return a.id < b.id; });
  result.report = tally_contributions(unit.admin_id, result.records);
  return result;
}

std::vector<std::optional<std::size_t>> assign_to_units(
    const std::vector<FootprintRecord>& records, const std::vector<AdminUnit>& units) {
  std::vector<Box> boxes;
  boxes.reserve(units.size());
  for (const AdminUnit& u : units) boxes.push_back(u.bbox());
  const SpatialIndex index{std::span<const Box>(boxes)};
  std::vector<std::optional<std::size_t>> out(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const Point c = records[i].geometry.centroid();
    for (std::size_t u : index.query({c.x, c.y, c.x, c.y})) {
      if (units[u].contains(c)) {
        out[i] = u;
        break;
      }
    }
  }
  return out;
}

}  // namespace gba
