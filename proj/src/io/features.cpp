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
#include "gba/io/features.hpp"

#include <algorithm>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

#include "gba/error.hpp"
#include "gba/io/tables.hpp"

namespace gba::io {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

struct Parsed {
  Lod1Record record;
  bool repaired = false;
};

Ring parse_ring(const json& coords) {
  if (!coords.is_array()) throw InvalidGeometry("ring is not an array");
  if (coords.size() < 4) {
    throw InvalidGeometry(fmt::format("ring has {} positions, need at least 4", coords.size()));
  }
  Ring ring;
  ring.reserve(coords.size());
  for (const json& pos : coords) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
      throw InvalidGeometry("malformed position");
    }
    ring.push_back({pos[0].get<double>(), pos[1].get<double>()});
  }
  return ring;
}

std::pair<Ring, std::vector<Ring>> parse_rings(const json& poly) {
  if (!poly.is_array() || poly.empty()) throw InvalidGeometry("polygon has no rings");
  Ring ext = parse_ring(poly[0]);
  std::vector<Ring> holes;
  for (std::size_t i = 1; i < poly.size(); ++i) holes.push_back(parse_ring(poly[i]));
  return {std::move(ext), std::move(holes)};
}

// All polygon parts of a Polygon or MultiPolygon geometry.
std::vector<std::pair<Ring, std::vector<Ring>>> parse_parts(const json& geom) {
  if (!geom.is_object()) throw InvalidGeometry("missing geometry");
  const std::string type = geom.value("type", "");
  const auto& coords = geom.at("coordinates");
  std::vector<std::pair<Ring, std::vector<Ring>>> parts;
  if (type == "Polygon") {
    parts.push_back(parse_rings(coords));
  } else if (type == "MultiPolygon") {
    if (!coords.is_array() || coords.empty()) throw InvalidGeometry("empty MultiPolygon");
    for (const json& p : coords) parts.push_back(parse_rings(p));
  } else {
    throw InvalidGeometry("unsupported geometry type '" + type + "'");
  }
  return parts;
}

Crs feature_crs(const json& f) {
  if (f.contains("crs") && f["crs"].is_string()) return crs_from_string(f["crs"].get<std::string>());
  return Crs::Geographic;
}

std::optional<double> number_prop(const json& props, const char* key) {
  if (!props.contains(key) || props[key].is_null()) return std::nullopt;
  if (!props[key].is_number()) throw ValidationError(fmt::format("property {} is not a number", key));
  return props[key].get<double>();
}

std::string feature_id(const json& f, const std::string& stem, std::size_t ordinal) {
  if (f.contains("id")) {
    const json& id = f["id"];
    if (id.is_string()) return id.get<std::string>();
    if (id.is_number_integer()) return std::to_string(id.get<long long>());
  }
  return fmt::format("{}:{}", stem, ordinal);
}

Parsed parse_feature(const json& f, const std::string& id, std::optional<Source> source) {
  if (!f.is_object() || f.value("type", "") != "Feature") {
    throw ValidationError("not a Feature object");
  }
  const json props = f.contains("properties") && f["properties"].is_object() ? f["properties"]
                                                                            : json::object();
  auto parts = parse_parts(f.contains("geometry") ? f["geometry"] : json());
  if (parts.size() != 1) throw InvalidGeometry("multi-part geometry");
  RepairResult rr =
      repair(std::move(parts[0].first), std::move(parts[0].second), feature_crs(f));

  Parsed out{{FootprintRecord{id, std::move(rr.polygon), Source::Other, "", std::nullopt,
                               std::nullopt},
              {}, {}, {}},
             rr.repaired};
  FootprintRecord& rec = out.record.footprint;
  if (source) {
    rec.source = *source;
  } else if (props.contains("source") && props["source"].is_string()) {
    rec.source = source_from_string(props["source"].get<std::string>());
  }
  if (rec.source == Source::Other) {
    if (props.contains("source_label") && props["source_label"].is_string()) {
      rec.source_label = props["source_label"].get<std::string>();
    } else if (!source && props.contains("source") && props["source"].is_string()) {
      rec.source_label = props["source"].get<std::string>();
    }
  }
  if (props.contains("admin_id") && props["admin_id"].is_string()) {
    rec.admin_id = props["admin_id"].get<std::string>();
  }
  rec.height_m = number_prop(props, "height_m");
  if (rec.height_m && !(*rec.height_m >= 0.0)) throw ValidationError("negative height_m");
  out.record.height_m = rec.height_m;
  out.record.uncertainty_m2 = number_prop(props, "uncertainty_m2");
  out.record.volume_m3 = number_prop(props, "volume_m3");
  return out;
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

ojson ring_json(const Ring& r) {
  ojson a = ojson::array();
  for (const Point& p : r) a.push_back(ojson::array({p.x, p.y}));
  return a;
}

ojson geometry_json(const GeoPolygon& g) {
  ojson rings = ojson::array();
  rings.push_back(ring_json(g.exterior()));
  for (const Ring& h : g.holes()) rings.push_back(ring_json(h));
  return ojson{{"type", "Polygon"}, {"coordinates", std::move(rings)}};
}

ojson feature_json(const FootprintRecord& r, ojson props) {
  ojson f;
  f["type"] = "Feature";
  f["id"] = r.id;
  if (r.geometry.crs() != Crs::Geographic) f["crs"] = std::string(to_string(r.geometry.crs()));
  f["properties"] = std::move(props);
  f["geometry"] = geometry_json(r.geometry);
  return f;
}

ojson base_props(const FootprintRecord& r) {
  ojson p = ojson::object();
  p["source"] = std::string(to_string(r.source));
  if (r.source == Source::Other && !r.source_label.empty()) p["source_label"] = r.source_label;
  if (r.admin_id) p["admin_id"] = *r.admin_id;
  return p;
}

ojson opt(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt::format("{}", *v) : std::string();
}

}  // namespace

struct FeatureReader::Impl {
  std::unique_ptr<std::istream> in;
  std::optional<Source> source;
  std::string stem;
  FeatureReadReport report;
  std::size_t ordinal = 0;
  // Collection mode: features parsed up front.
  json collection;
  std::size_t next_index = 0;
  bool collection_mode = false;
  std::optional<std::string> pending_line;

  // nullopt when the feature was rejected.
  std::optional<Lod1Record> accept(const json& f) {
    ++ordinal;
    std::string id = fmt::format("{}:{}", stem, ordinal);
    try {
      id = feature_id(f, stem, ordinal);
      Parsed p = parse_feature(f, id, source);
      ++report.accepted;
      if (p.repaired) {
        ++report.repaired;
        report.repaired_ids.push_back(id);
      }
      return std::move(p.record);
    } catch (const ValidationError& e) {
      report.rejected.push_back({ordinal, id, e.what()});
    } catch (const json::exception& e) {
      report.rejected.push_back({ordinal, id, e.what()});
    }
    return std::nullopt;
  }

  std::optional<Lod1Record> next_line() {
    std::string line;
    while (true) {
      if (pending_line) {
        line = std::move(*pending_line);
        pending_line.reset();
      } else if (!std::getline(*in, line)) {
        if (in->bad()) throw IoError("read error in " + report.path);
        return std::nullopt;
      }
      if (blank(line)) continue;
      json f = json::parse(line, nullptr, false);
      if (f.is_discarded()) {
        ++ordinal;
        report.rejected.push_back({ordinal, fmt::format("{}:{}", stem, ordinal), "malformed JSON"});
        continue;
      }
      if (auto r = accept(f)) return r;
    }
  }
};

FeatureReader::FeatureReader(const std::filesystem::path& path, std::optional<Source> source)
    : impl_(std::make_unique<Impl>()) {
  impl_->source = source;
  impl_->stem = path.stem().string();
  impl_->report.path = path.string();
  auto file = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*file) throw IoError("cannot open " + path.string());

  std::string first;
  while (std::getline(*file, first) && blank(first)) {
  }
  if (blank(first)) {
    impl_->in = std::move(file);
    return;
  }
  json head = json::parse(first, nullptr, false);
  if (!head.is_discarded() && head.is_object() &&
      head.value("type", "") != "FeatureCollection") {
    impl_->pending_line = std::move(first);
    impl_->in = std::move(file);
    return;
  }
  if (head.is_discarded()) {
    // Possibly a pretty-printed document spanning several lines.
    std::ostringstream rest;
    rest << first << '\n' << file->rdbuf();
    std::string whole = rest.str();
    head = json::parse(whole, nullptr, false);
    if (head.is_discarded() || !head.is_object()) {
      impl_->in = std::make_unique<std::istringstream>(std::move(whole));
      return;
    }
  }
  impl_->collection_mode = true;
  if (head.value("type", "") == "FeatureCollection") {
    if (!head.contains("features") || !head["features"].is_array()) {
      throw IoError(path.string() + ": FeatureCollection without a features array");
    }
    impl_->collection = std::move(head["features"]);
  } else {
    impl_->collection = json::array({std::move(head)});
  }
}

FeatureReader::~FeatureReader() = default;
FeatureReader::FeatureReader(FeatureReader&&) noexcept = default;
FeatureReader& FeatureReader::operator=(FeatureReader&&) noexcept = default;

std::optional<Lod1Record> FeatureReader::next() {
  Impl& m = *impl_;
  if (!m.collection_mode) return m.next_line();
  while (m.next_index < m.collection.size()) {
    if (auto r = m.accept(m.collection[m.next_index++])) return r;
  }
  return std::nullopt;
}

const FeatureReadReport& FeatureReader::report() const { return impl_->report; }

std::vector<FootprintRecord> read_footprints(const std::filesystem::path& path,
                                             std::optional<Source> source,
                                             FeatureReadReport* report) {
  FeatureReader reader(path, source);
  std::vector<FootprintRecord> out;
  while (auto r = reader.next()) out.push_back(std::move(r->footprint));
  if (report) *report = reader.report();
  return out;
}

std::vector<Lod1Record> read_lod1(const std::filesystem::path& path, FeatureReadReport* report) {
  FeatureReader reader(path);
  std::vector<Lod1Record> out;
  while (auto r = reader.next()) out.push_back(std::move(*r));
  if (report) *report = reader.report();
  return out;
}

std::vector<AdminUnit> read_admin_units(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  std::vector<json> features;
  json doc = json::parse(text, nullptr, false);
  if (!doc.is_discarded() && doc.is_object() && doc.value("type", "") == "FeatureCollection") {
    for (const json& f : doc.at("features")) features.push_back(f);
  } else if (!doc.is_discarded() && doc.is_object()) {
    features.push_back(std::move(doc));
  } else {
    std::istringstream lines(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(lines, line)) {
      ++n;
      if (blank(line)) continue;
      json f = json::parse(line, nullptr, false);
      if (f.is_discarded()) throw IoError(fmt::format("{}:{}: malformed JSON", path.string(), n));
      features.push_back(std::move(f));
    }
  }
  std::vector<AdminUnit> units;
  for (const json& f : features) {
    const json props = f.value("properties", json::object());
    AdminUnit u;
    if (props.contains("admin_id") && props["admin_id"].is_string()) {
      u.admin_id = props["admin_id"].get<std::string>();
    } else if (f.contains("id") && f["id"].is_string()) {
      u.admin_id = f["id"].get<std::string>();
    } else {
      throw ValidationError(path.string() + ": admin unit without admin_id");
    }
    u.continent = continent_from_string(props.value("continent", ""));
    const Crs crs = feature_crs(f);
    for (auto& [ext, holes] : parse_parts(f.at("geometry"))) {
      u.parts.push_back(repair(std::move(ext), std::move(holes), crs).polygon);
    }
    units.push_back(std::move(u));
  }
  return units;
}

std::string feature_line(const FootprintRecord& r, const Properties& extra) {
  ojson props = base_props(r);
  if (r.height_m) props["height_m"] = *r.height_m;
  for (const auto& [k, v] : extra) props[k] = v;
  return feature_json(r, std::move(props)).dump();
}

std::string feature_line(const Lod1Record& r) {
  ojson props = base_props(r.footprint);
  props["height_m"] = opt(r.height_m);
  props["uncertainty_m2"] = opt(r.uncertainty_m2);
  props["volume_m3"] = opt(r.volume_m3);
  return feature_json(r.footprint, std::move(props)).dump();
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_footprints(const std::filesystem::path& path, std::vector<FootprintRecord> records,
                      const Properties& extra) {
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.id < b.id; });
  std::ofstream out = open_output(path);
  for (const auto& r : records) out << feature_line(r, extra) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void write_lod1(const std::filesystem::path& path, std::vector<Lod1Record> records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.footprint.id < b.footprint.id; });
  std::ofstream out = open_output(path);
  for (const auto& r : records) out << feature_line(r) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

void write_lod1_table(const std::filesystem::path& path, std::vector<Lod1Record> records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.footprint.id < b.footprint.id; });
  std::vector<std::vector<std::string>> rows;
  rows.reserve(records.size());
  for (const auto& r : records) {
    rows.push_back({r.footprint.id, fmt_opt(r.height_m), fmt_opt(r.uncertainty_m2),
                    fmt_opt(r.volume_m3)});
  }
  write_csv(path, {"id", "height_m", "variance_m2", "volume_m3"}, rows);
}

}  // namespace gba::io
