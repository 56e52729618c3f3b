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
#include "gba/io/fixture.hpp"

#include <random>

#include <fmt/format.h>

#include "gba/fusion.hpp"
#include "gba/io/features.hpp"
#include "gba/io/raster_io.hpp"
#include "gba/io/tables.hpp"
#include "gba/raster_ops.hpp"
#include "gba/synthetic.hpp"
#include "gba/tiling.hpp"

namespace gba::io {

namespace fs = std::filesystem;

namespace {

constexpr int kTownCols = 200;    // buildings live left of this column
constexpr int kSplitCol = 100;    // admin boundary
constexpr int kBuiltupCols = 20;  // built-up mask columns (10 px cells)
constexpr double kNodataHeight = -9999.0;
constexpr double kNodataProb = -1.0;

std::vector<FootprintRecord> relabel(const std::vector<FootprintRecord>& src, Source s,
                                     const std::string& prefix, double keep, std::mt19937_64& rng,
                                     int shift_px, const GridSpec& g) {
  std::bernoulli_distribution take(keep);
  std::vector<FootprintRecord> out;
  for (const FootprintRecord& r : src) {
    if (!take(rng)) continue;
    FootprintRecord c = r;
    c.id = prefix + r.id.substr(r.id.find('_'));
    c.source = s;
    c.source_label.clear();
    c.height_m.reset();
    if (shift_px != 0) c.geometry = c.geometry.translated(shift_px * g.pixel_w, 0.0);
    out.push_back(std::move(c));
  }
  return out;
}

std::string admin_line(const std::string& id, const std::string& continent, const Box& b) {
  return fmt::format(
      R"({{"type":"Feature","id":"{0}","properties":{{"admin_id":"{0}","continent":"{1}"}},)"
      R"("geometry":{{"type":"Polygon","coordinates":[[[{2},{3}],[{4},{3}],[{4},{5}],[{2},{5}],[{2},{3}]]]}}}})",
      id, continent, b.min_x, b.min_y, b.max_x, b.max_y);
}

}  // namespace

GridSpec fixture_grid() {
  return GridSpec{11.50, 48.14, 4e-5, 2.7e-5, 400, 320, Crs::Geographic};
}

FixtureCity write_fixture_city(const fs::path& dir, std::uint64_t seed) {
  fs::create_directories(dir);
  const GridSpec g = fixture_grid();
  std::mt19937_64 rng(seed);

  TownOptions town;
  town.lattice = g;
  town.count = 160;
  town.min_side_px = 3;
  town.max_side_px = 9;
  town.gap_px = 2;
  town.col_limit = kTownCols;
  town.min_height_m = 3.0;
  town.max_height_m = 36.0;
  town.id_prefix = "ref";
  std::vector<FootprintRecord> reference = make_town(seed, town);
  for (auto& r : reference) r.source_label = "reference";

  write_footprints(dir / "reference.jsonl", reference);
  write_footprints(dir / "osm.jsonl", relabel(reference, Source::OSM, "osm", 0.75, rng, 0, g));
  write_footprints(dir / "microsoft.jsonl",
                   relabel(reference, Source::Microsoft, "ms", 0.6, rng, 1, g));
  write_footprints(dir / "openbuildings.jsonl",
                   relabel(reference, Source::OpenBuildings, "ob", 0.55, rng, 0, g));

  const Box b = g.bounds();
  const double split_x = g.origin_x + kSplitCol * g.pixel_w;
  {
    std::ofstream out = open_output(dir / "admin.jsonl");
    out << admin_line("unit_east", "SA", {split_x, b.min_y, b.max_x, b.max_y}) << '\n';
    out << admin_line("unit_west", "EU", {b.min_x, b.min_y, split_x, b.max_y}) << '\n';
  }

  // Probability scenes: buildings plus a few false-positive blobs far east.
  std::vector<GeoPolygon> blobs;
  std::uniform_int_distribution<int> blob_row(0, g.height - 8);
  for (int i = 0; i < 4; ++i) blobs.push_back(pixel_rectangle(g, blob_row(rng), 340 + 12 * i, 6, 6));
  std::vector<GeoPolygon> burn;
  for (const auto& r : reference) burn.push_back(r.geometry);
  burn.insert(burn.end(), blobs.begin(), blobs.end());
  const RasterGrid footprint_mask = rasterize(std::span<const GeoPolygon>(burn), g);

  struct SceneSpec {
    const char* id;
    double cloud;
    int year;
    int doy;
    double inside;
    bool cloud_hole;
  };
  const SceneSpec specs[] = {{"scene_a", 0.05, 2019, 200, 0.92, true},
                             {"scene_b", 0.08, 2019, 150, 0.88, false},
                             {"scene_c", 0.30, 2019, 210, 0.97, false},
                             {"scene_d", 0.02, 2018, 180, 0.99, false}};
  std::normal_distribution<double> noise(0.0, 0.02);
  std::vector<std::vector<std::string>> scene_rows;
  for (const SceneSpec& s : specs) {
    std::vector<double> v(g.size());
    std::vector<double> usable(g.size(), 1.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double base = footprint_mask.values()[i] == 1.0 ? s.inside : 0.05;
      v[i] = std::clamp(base + noise(rng), 0.0, 1.0);
    }
    if (s.cloud_hole) {
      for (int r = 40; r < 120; ++r) {
        for (int c = 30; c < 90; ++c) usable[static_cast<std::size_t>(r) * g.width + c] = 0.0;
      }
    }
    const std::string img = fmt::format("{}.tif", s.id);
    const std::string mask = fmt::format("{}_udm.tif", s.id);
    write_raster(dir / img, RasterGrid(g, Semantic::Probability, kNodataProb, std::move(v)),
                 {SampleType::Float32});
    write_raster(dir / mask, RasterGrid(g, Semantic::BinaryMask, 0.0, std::move(usable)));
    scene_rows.push_back({s.id, fmt::format("{}", s.cloud), std::to_string(s.year),
                          std::to_string(s.doy), img, mask});
  }
  write_csv(dir / "scenes.csv", {"scene_id", "cloud_fraction", "year", "doy", "path", "mask_path"},
            scene_rows);

  // Built-up mask on 10x coarser cells covering the town.
  GridSpec coarse{g.origin_x, g.origin_y, g.pixel_w * 10, g.pixel_h * 10, g.width / 10,
                  g.height / 10, Crs::Geographic};
  std::vector<double> bu(coarse.size(), 0.0);
  for (int r = 0; r < coarse.height; ++r) {
    for (int c = 0; c < kBuiltupCols; ++c) bu[static_cast<std::size_t>(r) * coarse.width + c] = 1.0;
  }
  write_raster(dir / "builtup.tif", RasterGrid(coarse, Semantic::BinaryMask, 255.0, std::move(bu)));

  // Four TTA height predictions, each missing a different band of rows.
  std::vector<double> heights;
  for (const auto& r : reference) heights.push_back(*r.height_m);
  const RasterGrid truth = rasterize(std::span<const FootprintRecord>(reference), g, heights,
                                     Semantic::HeightMeters, 0.0, kNodataHeight);
  std::normal_distribution<double> hnoise(0.0, 0.6);
  std::string layers;
  for (int k = 0; k < 4; ++k) {
    std::vector<double> v(g.size());
    for (int r = 0; r < g.height; ++r) {
      for (int c = 0; c < g.width; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * g.width + c;
        const bool missing = r >= k * 80 && r < k * 80 + 20;
        v[i] = missing ? kNodataHeight : std::max(0.0, truth.values()[i] + hnoise(rng));
      }
    }
    const std::string name = fmt::format("height_tta_{}.tif", k);
    write_raster(dir / name, RasterGrid(g, Semantic::HeightMeters, kNodataHeight, std::move(v)),
                 {SampleType::Float32});
    layers += (k ? ", " : "") + name;
  }

  write_csv(dir / "population.csv", {"region_id", "year", "population"},
            {{"unit_east", "2019", "5200"}, {"unit_west", "2019", "14800"}});
  write_csv(dir / "counts.csv", {"continent", "count"},
            {{"AS", "1.22e9"}, {"AF", "0.54e9"}, {"EU", "0.403e9"}, {"NA", "0.295e9"},
             {"SA", "0.264e9"}, {"OC", "0.014e9"}});
  write_csv(dir / "ratios.csv", {"continent", "n_ratio"},
            {{"AS", "1.04"}, {"EU", "1.19"}, {"NA", "1.09"}, {"SA", "0.69"}, {"OC", "1.16"}});

  const fs::path config = dir / "demo.toml";
  {
    std::ofstream out = open_output(config);
    out << "# Synthetic fixture city\n"
        << "[general]\ncity = \"fixture\"\n"
        << fmt::format("tile = \"{}\"\n", tile_of(b.center().x, b.center().y).tag())
        << fmt::format("seed = {}\n", seed) << "out = \"out\"\n\n"
        << "[mosaic]\nscenes = \"scenes.csv\"\n"
        << fmt::format("grid = \"{}, {}, {}, {}, {}, {}\"\n", g.origin_x, g.origin_y, g.pixel_w,
                       g.pixel_h, g.width, g.height)
        << "max_cloud = 0.10\nprimary_year = 2019\nfallback_year = 2018\n\n"
        << "[polygonize]\nbuiltup = \"builtup.tif\"\nthreshold = 0.5\nregularize = true\n"
        << "simplify_tolerance_m = 3\nmin_area_m2 = 20\ndilation_m = 250\n\n"
        << "[fusion]\nadmin_units = \"admin.jsonl\"\nosm = \"osm.jsonl\"\n"
        << "microsoft = \"microsoft.jsonl\"\nopenbuildings = \"openbuildings.jsonl\"\n"
        << "overlap_threshold = 0.1\n\n"
        << "[lod1]\nheight_layers = \"" << layers << "\"\nmin_height_m = 1.0\n\n"
        << "[eval]\nreference = \"reference.jsonl\"\niou_resolution_m = 3\npixel_m = 1\n"
        << "cell_m = 10\n\n"
        << "[analyze]\ncell_m = 480\npopulation = \"population.csv\"\n";
  }
  return {config, g, std::move(reference)};
}

}  // namespace gba::io
