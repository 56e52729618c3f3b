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
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"

#include "gba/error.hpp"
#include "gba/io/config.hpp"
#include "gba/io/features.hpp"
#include "gba/io/raster_io.hpp"
#include "gba/io/tables.hpp"
#include "support.hpp"

using namespace gba;
using namespace gba::io;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gba_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int n = 0;
    return n;
  }
  fs::path operator/(const std::string& name) const { return path / name; }
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(GBA_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RasterGrid sample_raster(Semantic s, double nodata, std::vector<double> v) {
  return RasterGrid(GridSpec{11.5, 48.14, 4e-5, 2.7e-5, 4, 3, Crs::Geographic}, s, nodata,
                    std::move(v));
}

constexpr const char* kSquare =
    R"({"type":"Feature","id":"%ID%","properties":{"height_m":%H%},"geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,1],[0,0]]]}})";

std::string square(const std::string& id, const std::string& h = "null") {
  std::string s = kSquare;
  s.replace(s.find("%ID%"), 4, id);
  s.replace(s.find("%H%"), 3, h);
  return s;
}

}  // namespace

TEST_CASE("raster round trips per sample type") {
  TempDir dir;
  struct Case {
    SampleType type;
    Semantic semantic;
    double nodata;
    std::vector<double> values;
  };
  const std::vector<Case> cases = {
      {SampleType::UInt8, Semantic::BinaryMask, 255, {0, 1, 1, 0, 0, 1, 0, 0, 1, 1, 1, 0}},
      {SampleType::Int16, Semantic::HeightMeters, -9999, {-3, 0, 12, 300, -9999, 5, 6, 7, 8, 9, 10, 11}},
      {SampleType::UInt16, Semantic::LandCoverClass, 0, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 60000, 0}},
      {SampleType::Int32, Semantic::VolumeM3, -1, {0, 1e6, 2e9, 5, -1, 6, 7, 8, 9, 10, 11, 12}},
      {SampleType::Float32, Semantic::Probability, -1, {0.1, 0.25, 0.5, 0.75, 1, 0, -1, 0.3, 0.9, 0.2, 0.4, 0.6}},
      {SampleType::Float64, Semantic::VarianceM2, -9999, {0.1, 1e-9, 3.3, 0, 7, 8, 9, -9999, 1, 2, 3, 4}},
  };
  for (const Case& c : cases) {
    const RasterGrid r = sample_raster(c.semantic, c.nodata, c.values);
    for (Compression comp : {Compression::None, Compression::Deflate}) {
      RasterWriteOptions o;
      o.sample_type = c.type;
      o.compression = comp;
      o.tile_size = 16;
      const fs::path p = dir / "r.tif";
      write_raster(p, r, o);
      const RasterGrid back = read_raster(p);
      CHECK(back.semantic() == c.semantic);
      CHECK(back.nodata() == c.nodata);
      CHECK(back.spec() == r.spec());
      for (std::size_t i = 0; i < c.values.size(); ++i) {
        if (c.type == SampleType::Float32) {
          CHECK(back.values()[i] == doctest::Approx(c.values[i]).epsilon(1e-6));
        } else {
          CHECK(back.values()[i] == c.values[i]);
        }
      }
    }
  }
}

TEST_CASE("raster io details") {
  TempDir dir;
  // NaN nodata survives.
  const RasterGrid nan_r = sample_raster(Semantic::HeightMeters, std::nan(""),
                                         {1, 2, std::nan(""), 4, 5, 6, 7, 8, 9, 10, 11, 12});
  write_raster(dir / "nan.tif", nan_r);
  const RasterGrid nan_back = read_raster(dir / "nan.tif");
  CHECK(std::isnan(nan_back.nodata()));
  CHECK(nan_back.is_nodata(nan_back.at(0, 2)));
  // Planar grids keep their CRS; larger rasters span several tiles.
  std::vector<double> big(70 * 45);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = static_cast<double>(i % 97);
  const RasterGrid planar(GridSpec{500000, 5300000, 3, 3, 70, 45, Crs::Planar},
                          Semantic::HeightMeters, -1, big);
  RasterWriteOptions o;
  o.tile_size = 32;
  write_raster(dir / "sub" / "planar.tif", planar, o);
  CHECK(read_raster(dir / "sub" / "planar.tif") == planar);
  // Bands.
  const std::vector<RasterGrid> bands = {planar, planar.with_values(std::vector<double>(big.size(), 2.0))};
  write_raster_bands(dir / "bands.tif", bands, o);
  const auto read_bands = read_raster_bands(dir / "bands.tif");
  REQUIRE(read_bands.size() == 2);
  CHECK(read_bands[1] == bands[1]);
  CHECK_THROWS_AS(read_raster(dir / "bands.tif"), IoError);
  // Unrepresentable values are refused.
  RasterWriteOptions u8;
  u8.sample_type = SampleType::UInt8;
  CHECK_THROWS_AS(write_raster(dir / "x.tif", planar.with_values(std::vector<double>(big.size(), 300.0)), u8),
                  ValidationError);
  // Errors.
  CHECK_THROWS_AS(read_raster(dir / "missing.tif"), IoError);
  write_text(dir / "junk.tif", "not a tiff");
  CHECK_THROWS_AS(read_raster(dir / "junk.tif"), IoError);
  CHECK(default_sample_type(Semantic::BinaryMask) == SampleType::UInt8);
  CHECK(default_sample_type(Semantic::HeightMeters) == SampleType::Float64);
}

TEST_CASE("missing georeferencing is an I/O error") {
  TempDir dir;
  // A minimal uncompressed 1x1 8-bit TIFF without geo tags.
  const unsigned char tiff[] = {
      'I', 'I', 42, 0, 8, 0, 0, 0,                 // header, IFD at 8
      8, 0,                                        // 8 entries
      0x00, 0x01, 3, 0, 1, 0, 0, 0, 1, 0, 0, 0,    // width 1
      0x01, 0x01, 3, 0, 1, 0, 0, 0, 1, 0, 0, 0,    // height 1
      0x02, 0x01, 3, 0, 1, 0, 0, 0, 8, 0, 0, 0,    // bits 8
      0x03, 0x01, 3, 0, 1, 0, 0, 0, 1, 0, 0, 0,    // no compression
      0x06, 0x01, 3, 0, 1, 0, 0, 0, 1, 0, 0, 0,    // min-is-black
      0x11, 0x01, 4, 0, 1, 0, 0, 0, 110, 0, 0, 0,  // strip offset
      0x16, 0x01, 3, 0, 1, 0, 0, 0, 1, 0, 0, 0,    // rows per strip
      0x17, 0x01, 4, 0, 1, 0, 0, 0, 1, 0, 0, 0,    // strip byte count
      0, 0, 0, 0,                                  // next IFD
      7};                                          // pixel
  std::ofstream(dir / "plain.tif", std::ios::binary)
      .write(reinterpret_cast<const char*>(tiff), sizeof(tiff));
  CHECK_THROWS_AS(read_raster(dir / "plain.tif"), IoError);
}

TEST_CASE("feature reading with repair and rejection") {
  TempDir dir;
  const std::string bowtie =
      R"({"type":"Feature","id":"bow","properties":{},"geometry":{"type":"Polygon","coordinates":[[[0,0],[2,2],[2,0],[0,2],[0,0]]]}})";
  const std::string tri =
      R"({"type":"Feature","id":"tri","properties":{},"geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[0,1]]]}})";
  write_text(dir / "f.jsonl", square("a", "3.5") + "\n" + square("b") + "\n\n" + bowtie + "\n" +
                                  square("c", "12") + "\n" + tri + "\n{broken\n");
  FeatureReadReport rep;
  const auto recs = read_footprints(dir / "f.jsonl", Source::OSM, &rep);
  REQUIRE(recs.size() == 4);
  CHECK(rep.accepted == 4);
  CHECK(rep.repaired == 1);
  CHECK(rep.repaired_ids == std::vector<std::string>{"bow"});
  REQUIRE(rep.rejected.size() == 2);
  CHECK(rep.rejected[0].id == "tri");
  CHECK(rep.rejected[0].ordinal == 5);
  CHECK(recs[0].height_m == 3.5);
  CHECK_FALSE(recs[1].height_m.has_value());
  CHECK(recs[0].source == Source::OSM);
  CHECK(recs[0].geometry.crs() == Crs::Geographic);

  write_text(dir / "empty.jsonl", "");
  FeatureReadReport er;
  CHECK(read_footprints(dir / "empty.jsonl", std::nullopt, &er).empty());
  CHECK(er.accepted == 0);
  CHECK(er.rejected.empty());
  CHECK_THROWS_AS(read_footprints(dir / "nope.jsonl"), IoError);

  // Streaming gives the same records one by one.
  FeatureReader reader(dir / "f.jsonl");
  std::size_t n = 0;
  while (auto r = reader.next()) ++n;
  CHECK(n == 4);
  CHECK(reader.report().rejected.size() == 2);
}

TEST_CASE("feature collections, ids and properties") {
  TempDir dir;
  write_text(dir / "fc.json", "{\n  \"type\": \"FeatureCollection\",\n  \"features\": [\n    " +
                                  square("x", "4") + ",\n    " + square("y") + "\n  ]\n}\n");
  const auto recs = read_footprints(dir / "fc.json");
  REQUIRE(recs.size() == 2);
  CHECK(recs[1].id == "y");
  write_text(dir / "noid.jsonl",
             R"({"type":"Feature","properties":{"source":"cadastre","admin_id":"u1"},"crs":"planar","geometry":{"type":"Polygon","coordinates":[[[0,0],[4,0],[4,4],[0,4],[0,0]]]}})"
             "\n");
  const auto n = read_footprints(dir / "noid.jsonl");
  REQUIRE(n.size() == 1);
  CHECK(n[0].id == "noid:1");
  CHECK(n[0].source == Source::Other);
  CHECK(n[0].source_name() == "cadastre");
  CHECK(n[0].admin_id == "u1");
  CHECK(n[0].geometry.crs() == Crs::Planar);
  CHECK(polygon_area_m2(n[0].geometry) == 16.0);
  write_text(dir / "neg.jsonl", square("n", "-2") + "\n");
  FeatureReadReport rep;
  CHECK(read_footprints(dir / "neg.jsonl", std::nullopt, &rep).empty());
  CHECK(rep.rejected.size() == 1);
}

TEST_CASE("feature writing is sorted and round-trips") {
  TempDir dir;
  auto town = gba::test::planar_town(5, 30, 100);
  std::reverse(town.begin(), town.end());
  write_footprints(dir / "a.jsonl", town, {{"tile", "57_240"}});
  std::mt19937_64 rng(1);
  std::shuffle(town.begin(), town.end(), rng);
  write_footprints(dir / "b.jsonl", town, {{"tile", "57_240"}});
  CHECK(read_text(dir / "a.jsonl") == read_text(dir / "b.jsonl"));
  const auto back = read_footprints(dir / "a.jsonl");
  REQUIRE(back.size() == town.size());
  for (std::size_t i = 1; i < back.size(); ++i) CHECK(back[i - 1].id < back[i].id);
  for (const auto& r : back) {
    const auto it = std::find_if(town.begin(), town.end(), [&](const auto& t) { return t.id == r.id; });
    CHECK(it->geometry == r.geometry);
    CHECK(it->height_m == r.height_m);
  }
  const std::string first = read_text(dir / "a.jsonl").substr(0, 60);
  CHECK(first.rfind(R"({"type":"Feature","id":)", 0) == 0);

  std::vector<Lod1Record> lod;
  for (const auto& r : town) lod.push_back(Lod1Record{r, r.height_m, 0.5, 10.0});
  lod[0].uncertainty_m2.reset();
  write_lod1(dir / "l.jsonl", lod);
  write_lod1_table(dir / "l.csv", lod);
  const auto lb = read_lod1(dir / "l.jsonl");
  CHECK(lb.size() == lod.size());
  const CsvTable t = read_csv(dir / "l.csv");
  CHECK(t.header == std::vector<std::string>{"id", "height_m", "variance_m2", "volume_m3"});
  CHECK(t.rows.size() == lod.size());
}

TEST_CASE("csv parsing") {
  const CsvTable t = parse_csv("a,b,c\r\n1,\"x, \"\"y\"\"\",3\r\n4,,6\n");
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "x, \"y\"");
  CHECK(t.rows[1][1].empty());
  CHECK(t.column("c") == 2);
  CHECK_FALSE(t.find_column("d").has_value());
  CHECK_THROWS_AS((void)t.column("d"), IoError);
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(parse_number("2.5e3", "t") == 2500.0);
  CHECK_THROWS_AS(parse_number("abc", "t"), IoError);

  TempDir dir;
  write_text(dir / "pop.csv", "region_id,year,population\nA,2019,10\nA,2020,12\nB,2019,5\n");
  auto latest = read_region_values(dir / "pop.csv", "population");
  CHECK(latest.at("A") == 12.0);
  auto y2019 = read_region_values(dir / "pop.csv", "population", 2019);
  CHECK(y2019.at("A") == 10.0);
  write_text(dir / "c.csv", "continent,count\nEU,4\nSA,5\n");
  const auto cv = read_continent_values(dir / "c.csv", "count");
  CHECK(cv.at(Continent::SA) == 5.0);
  write_text(dir / "bad.csv", "continent,count\nXX,4\n");
  CHECK_THROWS(read_continent_values(dir / "bad.csv", "count"));
}

TEST_CASE("config parsing and validation") {
  TempDir dir;
  const std::string text = R"(# demo
[general]
city = "munich"
tile = 57,240
seed = 3
out = out

[mosaic]
max_cloud = 0.2
grid = 11.5, 48.14, 0.0001, 0.0001, 10, 10

[polygonize]
threshold = 0.6
dilation_m = 100

[fusion]
osm = osm.jsonl
overlap_threshold = 0.2

[lod1]
height_layers = h0.tif, h1.tif
min_height_m = 1.0

[eval]
ap_protocol = area-ranked
cell_m = 20
)";
  const PipelineConfig c = parse_config(text, dir.path);
  CHECK(c.city == "munich");
  CHECK(c.tile == TileId{57, 240});
  CHECK(c.seed == 3);
  CHECK(c.out_dir == dir.path / "out");
  CHECK(c.scene_filter.max_cloud == 0.2);
  CHECK(c.grid->width == 10);
  CHECK(c.polygonize.threshold == 0.6);
  CHECK(c.footprints.at(Source::OSM) == dir.path / "osm.jsonl");
  CHECK(c.overlap_threshold == 0.2);
  CHECK(c.height_layers.size() == 2);
  CHECK(c.eval.protocol == ApProtocol::AreaRanked);
  CHECK(c.eval.volume.cell_m == 20.0);
  CHECK_NOTHROW(c.validate(false));
  CHECK_THROWS_AS(c.validate(true), ValidationError);  // files do not exist

  CHECK_THROWS_AS(parse_config("[polygonize]\nthreshold = 1.5\n", dir.path).validate(false),
                  ValidationError);
  CHECK_THROWS_AS(parse_config("[mosaic]\nmax_cloud = -0.1\n", dir.path).validate(false),
                  ValidationError);
  CHECK_THROWS_AS(parse_config("[fusion]\noverlap_threshold = 2\n", dir.path).validate(false),
                  ValidationError);
  CHECK_THROWS_AS(parse_config("[lod1]\nheight_layers = a,b,c,d,e\n", dir.path).validate(false),
                  ValidationError);
  CHECK_THROWS_AS(parse_config("[nonsense]\nx = 1\n", dir.path), ValidationError);
  CHECK_THROWS_AS(parse_config("[general]\ncolour = red\n", dir.path), ValidationError);
  CHECK_THROWS_AS(load_config(dir / "absent.toml"), IoError);
  CHECK(parse_grid("0, 10, 1, 1, 5, 5", Crs::Planar).height == 5);
  CHECK_THROWS_AS(parse_grid("0, 10, 1", Crs::Planar), ValidationError);
}

TEST_CASE("command-line exit codes") {
  TempDir dir;
  const auto town = gba::test::planar_town(2, 20, 80);
  write_footprints(dir / "a.jsonl", town);
  CHECK(run_cli("eval --pred " + (dir / "a.jsonl").string() + " --gt " +
                (dir / "a.jsonl").string() + " --out " + dir.path.string()) == 0);
  const CsvTable t = read_csv(dir / "eval.csv");
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][t.column("iou")] == "1.000000");
  CHECK(t.rows[0][t.column("n_ratio")] == "1.000000");
  CHECK(t.rows[0][t.column("ap50")] == "1.000000");

  CHECK(run_cli("eval --pred " + (dir / "missing.jsonl").string() + " --gt " +
                (dir / "a.jsonl").string()) == 2);
  CHECK(run_cli("eval --pred x --gt y --bogus") == 64);
  CHECK(run_cli("frobnicate") == 64);
  CHECK(run_cli("--help") == 0);
  write_text(dir / "bad.toml", "[polygonize]\nthreshold = 7\n");
  CHECK(run_cli("pipeline --config " + (dir / "bad.toml").string()) == 1);
  write_text(dir / "r.csv", "continent,n_ratio\nEU,0\n");
  write_text(dir / "c.csv", "continent,count\nEU,5\n");
  CHECK(run_cli("analyze global-count --counts " + (dir / "c.csv").string() + " --ratios " +
                (dir / "r.csv").string()) == 1);
}
