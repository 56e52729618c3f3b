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
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <vector>

#include "gba/analytics.hpp"
#include "gba/error.hpp"
#include "gba/fusion.hpp"
#include "gba/geometry.hpp"
#include "gba/io/config.hpp"
#include "gba/io/features.hpp"
#include "gba/io/fixture.hpp"
#include "gba/io/pipeline.hpp"
#include "gba/io/raster_io.hpp"
#include "gba/lod1.hpp"
#include "gba/metrics.hpp"
#include "gba/polygonize.hpp"
#include "gba/raster_ops.hpp"
#include "gba/tiling.hpp"

namespace py = pybind11;
using namespace gba;

namespace {

Ring to_ring(const std::vector<std::pair<double, double>>& pts) {
  Ring r;
  r.reserve(pts.size());
  for (const auto& [x, y] : pts) r.push_back({x, y});
  return r;
}

std::vector<std::pair<double, double>> from_ring(const Ring& r) {
  std::vector<std::pair<double, double>> out;
  out.reserve(r.size());
  for (const Point& p : r) out.emplace_back(p.x, p.y);
  return out;
}

py::array_t<double> values_array(const RasterGrid& r) {
  py::array_t<double> a({r.height(), r.width()});
  std::copy(r.values().begin(), r.values().end(), a.mutable_data());
  return a;
}

RasterGrid make_raster(const GridSpec& spec, const std::string& semantic, double nodata,
                       py::array_t<double, py::array::c_style | py::array::forcecast> values) {
  if (values.ndim() != 2 || values.shape(0) != spec.height || values.shape(1) != spec.width) {
    throw InvalidGrid("values must have shape (height, width)");
  }
  std::vector<double> v(values.data(), values.data() + values.size());
  return RasterGrid(spec, semantic_from_string(semantic), nodata, std::move(v));
}

py::dict report_dict(const EvalReport& r) {
  py::dict d;
  d["city"] = r.city;
  d["product"] = r.product;
  d["iou"] = r.iou;
  d["ap50"] = r.ap50;
  d["ar50"] = r.ar50;
  d["n_ratio"] = r.n_ratio;
  d["rmse_bv"] = r.rmse_bv;
  d["mae_bv"] = r.mae_bv;
  d["rmse_bh"] = r.rmse_bh;
  d["mae_bh"] = r.mae_bh;
  d["completeness"] = r.completeness;
  return d;
}

std::map<Continent, double> continent_map(const std::map<std::string, double>& in) {
  std::map<Continent, double> out;
  for (const auto& [k, v] : in) out[continent_from_string(k)] = v;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Building footprint, LoD1 and statistics toolkit";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<IoError>(m, "IoError", error.ptr());

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](double ox, double oy, double pw, double ph, int w, int h,
                       const std::string& crs) {
             GridSpec g{ox, oy, pw, ph, w, h, crs_from_string(crs)};
             g.validate();
             return g;
           }),
           py::arg("origin_x"), py::arg("origin_y"), py::arg("pixel_w"), py::arg("pixel_h"),
           py::arg("width"), py::arg("height"), py::arg("crs") = "planar")
      .def_readonly("origin_x", &GridSpec::origin_x)
      .def_readonly("origin_y", &GridSpec::origin_y)
      .def_readonly("pixel_w", &GridSpec::pixel_w)
      .def_readonly("pixel_h", &GridSpec::pixel_h)
      .def_readonly("width", &GridSpec::width)
      .def_readonly("height", &GridSpec::height)
      .def_property_readonly("crs", [](const GridSpec& g) { return std::string(to_string(g.crs)); })
      .def("cell_of",
           [](const GridSpec& g, double x, double y) -> std::optional<std::pair<int, int>> {
             if (auto c = g.cell_of({x, y})) return std::pair{c->row, c->col};
             return std::nullopt;
           })
      .def("__eq__", [](const GridSpec& a, const GridSpec& b) { return a == b; })
      .def("__repr__", [](const GridSpec& g) {
        return "GridSpec(" + std::to_string(g.width) + "x" + std::to_string(g.height) + ", " +
               std::string(to_string(g.crs)) + ")";
      });

  py::class_<RasterGrid>(m, "RasterGrid")
      .def(py::init(&make_raster), py::arg("spec"), py::arg("semantic"), py::arg("nodata"),
           py::arg("values"))
      .def_property_readonly("spec", &RasterGrid::spec)
      .def_property_readonly("semantic",
                             [](const RasterGrid& r) { return std::string(to_string(r.semantic())); })
      .def_property_readonly("nodata", &RasterGrid::nodata)
      .def_property_readonly("values", &values_array)
      .def("count_nonzero", &RasterGrid::count_nonzero)
      .def("__eq__", [](const RasterGrid& a, const RasterGrid& b) { return a == b; });

  py::class_<GeoPolygon>(m, "GeoPolygon")
      .def(py::init([](const std::vector<std::pair<double, double>>& exterior,
                       const std::vector<std::vector<std::pair<double, double>>>& holes,
                       const std::string& crs) {
             std::vector<Ring> hs;
             for (const auto& h : holes) hs.push_back(to_ring(h));
             return GeoPolygon::make(to_ring(exterior), std::move(hs), crs_from_string(crs));
           }),
           py::arg("exterior"), py::arg("holes") = std::vector<std::vector<std::pair<double, double>>>{},
           py::arg("crs") = "geographic")
      .def_static(
          "rectangle",
          [](double x0, double y0, double x1, double y1, const std::string& crs) {
            return GeoPolygon::rectangle(x0, y0, x1, y1, crs_from_string(crs));
          },
          py::arg("min_x"), py::arg("min_y"), py::arg("max_x"), py::arg("max_y"),
          py::arg("crs") = "geographic")
      .def_property_readonly("exterior", [](const GeoPolygon& p) { return from_ring(p.exterior()); })
      .def_property_readonly("holes",
                             [](const GeoPolygon& p) {
                               std::vector<std::vector<std::pair<double, double>>> out;
                               for (const Ring& h : p.holes()) out.push_back(from_ring(h));
                               return out;
                             })
      .def_property_readonly("crs", [](const GeoPolygon& p) { return std::string(to_string(p.crs())); })
      .def_property_readonly("area_m2", &polygon_area_m2)
      .def_property_readonly("centroid",
                             [](const GeoPolygon& p) {
                               const Point c = p.centroid();
                               return std::pair{c.x, c.y};
                             })
      .def("__eq__", [](const GeoPolygon& a, const GeoPolygon& b) { return a == b; });

  py::class_<FootprintRecord>(m, "FootprintRecord")
      .def(py::init([](std::string id, GeoPolygon geometry, const std::string& source,
                       std::optional<double> height_m) {
             FootprintRecord r{std::move(id), std::move(geometry), source_from_string(source), "",
                               height_m, std::nullopt};
             if (r.source == Source::Other) r.source_label = source;
             return r;
           }),
           py::arg("id"), py::arg("geometry"), py::arg("source") = "other",
           py::arg("height_m") = std::nullopt)
      .def_readwrite("id", &FootprintRecord::id)
      .def_readwrite("geometry", &FootprintRecord::geometry)
      .def_readwrite("height_m", &FootprintRecord::height_m)
      .def_readwrite("admin_id", &FootprintRecord::admin_id)
      .def_property_readonly("source", &FootprintRecord::source_name);

  py::class_<Lod1Record>(m, "Lod1Record")
      .def_readonly("footprint", &Lod1Record::footprint)
      .def_readonly("height_m", &Lod1Record::height_m)
      .def_readonly("uncertainty_m2", &Lod1Record::uncertainty_m2)
      .def_readonly("volume_m3", &Lod1Record::volume_m3);

  // io
  m.def("read_raster",
        [](const std::filesystem::path& p) { return io::read_raster(p); }, py::arg("path"));
  m.def(
      "write_raster",
      [](const std::filesystem::path& p, const RasterGrid& r, bool deflate) {
        io::RasterWriteOptions o;
        o.compression = deflate ? io::Compression::Deflate : io::Compression::None;
        io::write_raster(p, r, o);
      },
      py::arg("path"), py::arg("raster"), py::arg("deflate") = true);
  m.def(
      "read_footprints",
      [](const std::filesystem::path& p) { return io::read_footprints(p); }, py::arg("path"));
  m.def(
      "write_footprints",
      [](const std::filesystem::path& p, std::vector<FootprintRecord> records) {
        io::write_footprints(p, std::move(records));
      },
      py::arg("path"), py::arg("records"));
  m.def("write_fixture_city",
        [](const std::filesystem::path& dir, std::uint64_t seed) {
          return io::write_fixture_city(dir, seed).config;
        },
        py::arg("dir"), py::arg("seed") = 7, "Writes the synthetic demo city; returns its config path.");
  m.def(
      "run_pipeline",
      [](const std::filesystem::path& config, std::optional<std::filesystem::path> out,
         int threads) {
        io::PipelineConfig cfg = io::load_config(config);
        if (out) cfg.out_dir = *out;
        cfg.validate();
        io::Log log;
        io::StageFiles files;
        {
          py::gil_scoped_release release;
          io::with_threads(threads, [&] { files = io::run_pipeline(cfg, cfg.out_dir, log); });
        }
        return py::make_tuple(files.written, log);
      },
      py::arg("config"), py::arg("out") = std::nullopt, py::arg("threads") = 1);

  // tiling
  m.def(
      "tile_of",
      [](double lon, double lat) {
        const TileId t = tile_of(lon, lat);
        return std::pair{t.ix, t.iy};
      },
      py::arg("lon"), py::arg("lat"));

  // polygonize
  m.def("threshold_mask", &threshold_mask, py::arg("prob"), py::arg("t") = 0.5);
  m.def("trace_polygons", &trace_polygons, py::arg("mask"));
  m.def(
      "rasterize",
      [](const std::vector<GeoPolygon>& polys, const GridSpec& grid) {
        return rasterize(std::span<const GeoPolygon>(polys), grid);
      },
      py::arg("polygons"), py::arg("grid"));

  // fusion
  m.def("merge", &merge, py::arg("primary"), py::arg("secondary"),
        py::arg("overlap_thresh") = 0.1);

  // lod1
  m.def("assign_height", &assign_height, py::arg("footprint"), py::arg("height"),
        py::arg("variance"));

  // metrics
  m.def(
      "evaluate",
      [](const std::vector<FootprintRecord>& pred, const std::vector<FootprintRecord>& gt) {
        return report_dict(evaluate(pred, gt));
      },
      py::arg("pred"), py::arg("gt"));

  // analytics
  m.def(
      "estimate_global_count",
      [](const std::map<std::string, double>& counts, const std::map<std::string, double>& ratios,
         double global_average) {
        const CountEstimate e =
            estimate_global_count(continent_map(counts), continent_map(ratios), global_average);
        return py::make_tuple(e.point, e.low, e.high);
      },
      py::arg("counts"), py::arg("ratios"), py::arg("global_average") = kGlobalAverageNRatio);
  m.def(
      "loglog_regression",
      [](const std::vector<double>& x, const std::vector<double>& y) -> std::optional<py::dict> {
        const auto r = loglog_regression(x, y);
        if (!r) return std::nullopt;
        py::dict d;
        d["slope"] = r->slope;
        d["intercept"] = r->intercept;
        d["pearson_r"] = r->pearson_r;
        d["spearman_rho"] = r->spearman_rho;
        d["n"] = r->n;
        d["excluded"] = r->excluded;
        return d;
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "spearman",
      [](const std::vector<double>& x, const std::vector<double>& y) { return spearman(x, y); },
      py::arg("x"), py::arg("y"));
  m.def(
      "ranking_agreement",
      [](const std::vector<double>& indicator, const std::vector<double>& reference) {
        const RankingAgreement a = ranking_agreement(indicator, reference);
        return py::make_tuple(a.pairs, a.agreements);
      },
      py::arg("indicator"), py::arg("reference"));
}
