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
#include "gba/io/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "gba/error.hpp"
#include "gba/io/tables.hpp"

namespace gba::io {

namespace pt = boost::property_tree;

namespace {

void in_range(double v, double lo, double hi, const char* name) {
  if (!(v >= lo && v <= hi)) {
    throw ValidationError(fmt::format("{} = {} is outside [{}, {}]", name, v, lo, hi));
  }
}

std::string unquote(std::string v) {
  boost::algorithm::trim(v);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
  return v;
}

class Section {
 public:
  Section(const pt::ptree& tree, std::string name, const std::filesystem::path& base)
      : name_(std::move(name)), base_(base) {
    if (auto child = tree.get_child_optional(name_)) node_ = &*child;
  }

  std::optional<std::string> str(const std::string& key) {
    used_.insert(key);
    if (!node_) return std::nullopt;
    auto v = node_->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return unquote(*v);
  }

  void number(const std::string& key, double& out) {
    if (auto v = str(key)) out = parse_number(*v, name_ + "." + key);
  }

  void integer(const std::string& key, int& out) {
    double d = out;
    number(key, d);
    if (d != static_cast<int>(d)) {
      throw ValidationError(fmt::format("{}.{} must be an integer", name_, key));
    }
    out = static_cast<int>(d);
  }

  void flag(const std::string& key, bool& out) {
    if (auto v = str(key)) {
      if (*v == "true" || *v == "1" || *v == "yes") {
        out = true;
      } else if (*v == "false" || *v == "0" || *v == "no") {
        out = false;
      } else {
        throw ValidationError(fmt::format("{}.{} must be true or false", name_, key));
      }
    }
  }

  void path(const std::string& key, std::filesystem::path& out) {
    if (auto v = str(key)) out = resolve(*v);
  }

  [[nodiscard]] std::filesystem::path resolve(const std::string& v) const {
    if (v.empty()) return {};
    std::filesystem::path p(v);
    return p.is_absolute() ? p : base_ / p;
  }

  void reject_unknown() const {
    if (!node_) return;
    for (const auto& [k, child] : *node_) {
      if (!used_.contains(k)) {
        throw ValidationError(fmt::format("unknown key {}.{}", name_, k));
      }
    }
  }

 private:
  std::string name_;
  std::filesystem::path base_;
  const pt::ptree* node_ = nullptr;
  std::set<std::string> used_;
};

void check_path(const std::filesystem::path& p, const char* what) {
  if (!p.empty() && !std::filesystem::exists(p)) {
    throw ValidationError(fmt::format("{} not found: {}", what, p.string()));
  }
}

}  // namespace

GridSpec parse_grid(std::string_view text, Crs crs) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::algorithm::is_any_of(","));
  if (parts.size() != 6) {
    throw ValidationError("grid needs origin_x, origin_y, pixel_w, pixel_h, width, height");
  }
  double v[6];
  for (int i = 0; i < 6; ++i) v[i] = parse_number(boost::algorithm::trim_copy(parts[i]), "grid");
  GridSpec g{v[0], v[1], v[2], v[3], static_cast<int>(v[4]), static_cast<int>(v[5]), crs};
  if (v[4] != g.width || v[5] != g.height) {
    throw ValidationError("grid width and height must be integers");
  }
  g.validate();
  return g;
}

void PipelineConfig::validate(bool check_paths) const {
  in_range(scene_filter.max_cloud, 0.0, 1.0, "mosaic.max_cloud");
  if (!(polygonize.threshold > 0.0 && polygonize.threshold < 1.0)) {
    throw ValidationError("polygonize.threshold must be inside (0, 1)");
  }
  in_range(polygonize.dilation_m, 0.0, 1e5, "polygonize.dilation_m");
  polygonize.simplify.validate();
  in_range(overlap_threshold, 0.0, 1.0, "fusion.overlap_threshold");
  in_range(min_height_m, 0.0, 1e3, "lod1.min_height_m");
  if (height_layers.size() > static_cast<std::size_t>(kMaxTtaLayers)) {
    throw ValidationError("lod1.height_layers takes at most 4 rasters");
  }
  if (!(eval.iou_resolution_m > 0.0)) throw ValidationError("eval.iou_resolution_m must be > 0");
  if (!(eval.volume.pixel_m > 0.0) || !(eval.volume.cell_m >= eval.volume.pixel_m)) {
    throw ValidationError("eval needs 0 < pixel_m <= cell_m");
  }
  in_range(eval.min_height_m, 0.0, 1e3, "eval.min_height_m");
  if (!(volume_cell_m > 0.0)) throw ValidationError("analyze.cell_m must be > 0");
  if (grid) grid->validate();
  if (!check_paths) return;
  check_path(scenes, "mosaic.scenes");
  check_path(probability, "polygonize.probability");
  check_path(builtup, "polygonize.builtup");
  check_path(admin_units, "fusion.admin_units");
  for (const auto& [s, p] : footprints) check_path(p, "fusion footprint file");
  for (const auto& p : height_layers) check_path(p, "lod1 height layer");
  check_path(reference, "eval.reference");
  check_path(population, "analyze.population");
}

PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  const std::set<std::string> known = {"general", "mosaic", "polygonize", "fusion",
                                       "lod1",    "eval",   "analyze"};
  for (const auto& [k, child] : tree) {
    if (!known.contains(k)) throw ValidationError("unknown config section [" + k + "]");
  }

  PipelineConfig c;
  Section general(tree, "general", base_dir);
  if (auto v = general.str("city")) c.city = *v;
  if (auto v = general.str("tile")) c.tile = TileId::parse(*v);
  if (auto v = general.str("seed")) c.seed = static_cast<std::uint64_t>(parse_number(*v, "seed"));
  general.path("out", c.out_dir);
  if (c.out_dir.is_relative()) c.out_dir = base_dir / c.out_dir;
  general.reject_unknown();

  Section mosaic(tree, "mosaic", base_dir);
  mosaic.path("scenes", c.scenes);
  Crs grid_crs = Crs::Geographic;
  if (auto v = mosaic.str("crs")) grid_crs = crs_from_string(*v);
  if (auto v = mosaic.str("grid")) c.grid = parse_grid(*v, grid_crs);
  mosaic.number("max_cloud", c.scene_filter.max_cloud);
  mosaic.integer("primary_year", c.scene_filter.primary_year);
  mosaic.integer("fallback_year", c.scene_filter.fallback_year);
  mosaic.reject_unknown();

  Section poly(tree, "polygonize", base_dir);
  poly.path("probability", c.probability);
  poly.path("builtup", c.builtup);
  poly.number("threshold", c.polygonize.threshold);
  poly.flag("regularize", c.polygonize.regularize);
  poly.number("simplify_tolerance_m", c.polygonize.simplify.tolerance_m);
  poly.number("min_area_m2", c.polygonize.simplify.min_area_m2);
  poly.number("dilation_m", c.polygonize.dilation_m);
  poly.reject_unknown();

  Section fusion(tree, "fusion", base_dir);
  fusion.path("admin_units", c.admin_units);
  for (Source s : kSourceOrder) {
    std::string key(to_string(s));
    boost::algorithm::to_lower(key);
    std::filesystem::path p;
    fusion.path(key, p);
    if (!p.empty()) c.footprints[s] = p;
  }
  fusion.flag("include_psr", c.include_psr);
  fusion.number("overlap_threshold", c.overlap_threshold);
  fusion.reject_unknown();

  Section lod1(tree, "lod1", base_dir);
  if (auto v = lod1.str("height_layers")) {
    std::vector<std::string> parts;
    boost::algorithm::split(parts, *v, boost::algorithm::is_any_of(","));
    for (auto& p : parts) {
      boost::algorithm::trim(p);
      if (!p.empty()) c.height_layers.push_back(lod1.resolve(p));
    }
  }
  lod1.number("min_height_m", c.min_height_m);
  lod1.reject_unknown();

  Section eval(tree, "eval", base_dir);
  eval.path("reference", c.reference);
  eval.number("iou_resolution_m", c.eval.iou_resolution_m);
  eval.number("pixel_m", c.eval.volume.pixel_m);
  eval.number("cell_m", c.eval.volume.cell_m);
  c.eval.min_height_m = c.min_height_m;
  if (auto v = eval.str("ap_protocol")) {
    if (*v == "single-point") {
      c.eval.protocol = ApProtocol::SinglePoint;
    } else if (*v == "area-ranked") {
      c.eval.protocol = ApProtocol::AreaRanked;
    } else {
      throw ValidationError("eval.ap_protocol must be single-point or area-ranked");
    }
  }
  eval.reject_unknown();

  Section analyze(tree, "analyze", base_dir);
  analyze.number("cell_m", c.volume_cell_m);
  analyze.path("population", c.population);
  analyze.reject_unknown();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_config(ss.str(), base);
}

}  // namespace gba::io
