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
#include "gba/io/tables.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "gba/error.hpp"
#include "gba/io/features.hpp"

namespace gba::io {

std::optional<std::size_t> CsvTable::find_column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t CsvTable::column(std::string_view name) const {
  if (auto i = find_column(name)) return *i;
  throw IoError(fmt::format("missing CSV column '{}'", name));
}

CsvTable parse_csv(std::string_view text, const std::string& origin) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        records.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += ch;
    }
  }
  if (quoted) throw IoError(origin + ": unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    records.push_back(std::move(row));
  }
  CsvTable t;
  if (records.empty()) return t;
  t.header = std::move(records.front());
  for (auto& h : t.header) {
    while (!h.empty() && h.back() == ' ') h.pop_back();
    while (!h.empty() && h.front() == ' ') h.erase(h.begin());
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.header.size()) {
      throw IoError(fmt::format("{}: row {} has {} fields, header has {}", origin, r + 1,
                                records[r].size(), t.header.size()));
    }
    t.rows.push_back(std::move(records[r]));
  }
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str(), path.string());
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out = open_output(path);
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(fields[i]);
    }
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  if (!out) throw IoError("write failed: " + path.string());
}

double parse_number(std::string_view text, const std::string& origin) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw IoError(fmt::format("{}: not a number: '{}'", origin, text));
  }
  return v;
}

std::map<Continent, double> read_continent_values(const std::filesystem::path& path,
                                                  std::string_view value_column) {
  const CsvTable t = read_csv(path);
  const std::size_t ci = t.column("continent");
  const std::size_t vi = t.column(value_column);
  std::map<Continent, double> out;
  for (const auto& r : t.rows) {
    Continent c{};
    try {
      c = continent_from_string(r[ci]);
    } catch (const ValidationError&) {
      throw IoError(fmt::format("{}: unknown continent '{}'", path.string(), r[ci]));
    }
    if (out.contains(c)) {
      throw IoError(fmt::format("{}: duplicate continent '{}'", path.string(), r[ci]));
    }
    out[c] = parse_number(r[vi], path.string());
  }
  return out;
}

std::map<std::string, double> read_region_values(const std::filesystem::path& path,
                                                 std::string_view value_column,
                                                 std::optional<int> year) {
  const CsvTable t = read_csv(path);
  const std::size_t ri = t.column("region_id");
  const std::size_t vi = t.column(value_column);
  const auto yi = t.find_column("year");
  std::map<std::string, std::pair<int, double>> best;
  for (const auto& r : t.rows) {
    const int y = yi ? static_cast<int>(parse_number(r[*yi], path.string())) : 0;
    if (year && yi && y != *year) continue;
    const double v = parse_number(r[vi], path.string());
    auto it = best.find(r[ri]);
    if (it == best.end() || y > it->second.first) best[r[ri]] = {y, v};
  }
  std::map<std::string, double> out;
  for (const auto& [k, v] : best) out[k] = v.second;
  return out;
}

std::vector<SceneRow> read_scene_table(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t id = t.column("scene_id");
  const std::size_t cf = t.column("cloud_fraction");
  const std::size_t yr = t.column("year");
  const std::size_t p = t.column("path");
  const std::size_t mp = t.column("mask_path");
  const auto doy = t.find_column("doy");
  const auto dir = path.parent_path();
  std::vector<SceneRow> out;
  for (const auto& r : t.rows) {
    SceneRow s;
    s.scene_id = r[id];
    s.cloud_fraction = parse_number(r[cf], path.string());
    s.year = static_cast<int>(parse_number(r[yr], path.string()));
    s.doy = doy && !r[*doy].empty() ? static_cast<int>(parse_number(r[*doy], path.string())) : 0;
    s.path = std::filesystem::path(r[p]).is_absolute() ? std::filesystem::path(r[p]) : dir / r[p];
    s.mask_path =
        std::filesystem::path(r[mp]).is_absolute() ? std::filesystem::path(r[mp]) : dir / r[mp];
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace gba::io
