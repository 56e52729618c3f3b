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
// gba: command-line front end for the building atlas toolkit.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "gba/analytics.hpp"
#include "gba/error.hpp"
#include "gba/io/config.hpp"
#include "gba/io/features.hpp"
#include "gba/io/fixture.hpp"
#include "gba/io/pipeline.hpp"
#include "gba/io/raster_io.hpp"
#include "gba/io/tables.hpp"
#include "gba/metrics.hpp"

namespace fs = std::filesystem;
using namespace gba;
using namespace gba::io;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitUsage = 64;

struct Common {
  std::string config;
  std::string tile;
  std::string out;
  int threads = default_threads();
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "Pipeline config file");
  sub->add_option("--tile", c.tile, "Tile id as ix,iy");
  sub->add_option("--out", c.out, "Output directory");
  sub->add_option("--threads", c.threads, "Worker threads (default $GBA_THREADS or 1)")
      ->check(CLI::Range(1, 1024));
  sub->add_option("--seed", c.seed, "Seed for randomised steps");
}

PipelineConfig config_for(const Common& c) {
  PipelineConfig cfg;
  if (!c.config.empty()) {
    cfg = load_config(c.config);
  } else {
    cfg.out_dir = fs::current_path() / "out";
  }
  if (!c.tile.empty()) cfg.tile = TileId::parse(c.tile);
  if (!c.out.empty()) cfg.out_dir = c.out;
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

void print_log(const Log& log) {
  for (const auto& line : log) std::cerr << line << '\n';
}

void print_written(const StageFiles& f) {
  for (const auto& p : f.written) std::cout << p.string() << '\n';
}

std::vector<double> column_values(const CsvTable& t, const std::string& name,
                                  const std::string& origin) {
  const std::size_t i = t.column(name);
  std::vector<double> v;
  v.reserve(t.rows.size());
  for (const auto& r : t.rows) v.push_back(parse_number(r[i], origin));
  return v;
}

std::string g(double v) { return fmt::format("{}", v); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global building atlas toolkit"};
  app.require_subcommand(1);
  app.fallthrough(false);

  // mosaic
  Common mosaic_c;
  std::string mosaic_scenes;
  auto* mosaic_cmd = app.add_subcommand("mosaic", "Cloud-filtered, prioritised scene mosaic");
  add_common(mosaic_cmd, mosaic_c);
  mosaic_cmd->add_option("--scenes", mosaic_scenes, "Scene table CSV");

  // polygonize
  Common poly_c;
  std::string poly_prob;
  std::string poly_builtup;
  std::optional<double> poly_threshold;
  auto* poly_cmd = app.add_subcommand("polygonize", "Probability raster to building polygons");
  add_common(poly_cmd, poly_c);
  poly_cmd->add_option("--prob", poly_prob, "Probability raster");
  poly_cmd->add_option("--builtup", poly_builtup, "Built-up mask raster");
  poly_cmd->add_option("--threshold", poly_threshold, "Probability threshold");

  // fuse
  Common fuse_c;
  std::string fuse_admin;
  std::vector<std::string> fuse_sources;
  std::string fuse_psr;
  auto* fuse_cmd = app.add_subcommand("fuse", "Quality-guided fusion per admin unit");
  add_common(fuse_cmd, fuse_c);
  fuse_cmd->add_option("--admin", fuse_admin, "Admin unit features");
  fuse_cmd->add_option("--source", fuse_sources, "Footprint file as name=path (repeatable)");
  fuse_cmd->add_option("--psr", fuse_psr, "Polygonized footprints");

  // lod1
  Common lod1_c;
  std::string lod1_fused;
  std::vector<std::string> lod1_heights;
  auto* lod1_cmd = app.add_subcommand("lod1", "Height assignment with TTA uncertainty");
  add_common(lod1_cmd, lod1_c);
  lod1_cmd->add_option("--fused", lod1_fused, "Fused footprints");
  lod1_cmd->add_option("--height", lod1_heights, "Height prediction raster (up to 4)")
      ;

  // eval
  Common eval_c;
  std::string eval_pred;
  std::string eval_gt;
  std::string eval_city = "city";
  std::string eval_product = "product";
  std::string eval_protocol = "single-point";
  std::optional<double> eval_cell;
  std::optional<double> eval_pixel;
  std::optional<double> eval_iou_res;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate predictions against a reference");
  add_common(eval_cmd, eval_c);
  eval_cmd->add_option("--pred", eval_pred, "Predicted footprints")->required()
      ;
  eval_cmd->add_option("--gt", eval_gt, "Reference footprints")->required()
      ;
  eval_cmd->add_option("--city", eval_city, "City label");
  eval_cmd->add_option("--product", eval_product, "Product label");
  eval_cmd->add_option("--cell-m", eval_cell, "Volume aggregation cell (m)");
  eval_cmd->add_option("--pixel-m", eval_pixel, "Volume rasterisation pixel (m)");
  eval_cmd->add_option("--iou-resolution", eval_iou_res, "IoU raster resolution (m)");
  eval_cmd->add_option("--ap-protocol", eval_protocol, "single-point or area-ranked")
      ->check(CLI::IsMember({"single-point", "area-ranked"}));

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Statistical analyses");
  analyze_cmd->require_subcommand(1);

  Common gc_c;
  std::string gc_counts;
  std::string gc_ratios;
  double gc_avg = kGlobalAverageNRatio;
  auto* gc_cmd = analyze_cmd->add_subcommand("global-count", "N-ratio count extrapolation");
  add_common(gc_cmd, gc_c);
  gc_cmd->add_option("--counts", gc_counts, "CSV continent,count")->required()
      ;
  gc_cmd->add_option("--ratios", gc_ratios, "CSV continent,n_ratio")->required()
      ;
  gc_cmd->add_option("--global-average", gc_avg, "Ratio for continents without one");

  Common reg_c;
  std::string reg_table;
  std::string reg_x;
  std::string reg_y;
  auto* reg_cmd = analyze_cmd->add_subcommand("regression", "Log-log regression of two columns");
  add_common(reg_cmd, reg_c);
  reg_cmd->add_option("--table", reg_table, "Input CSV")->required();
  reg_cmd->add_option("--x", reg_x, "Predictor column")->required();
  reg_cmd->add_option("--y", reg_y, "Response column")->required();

  Common pc_c;
  std::string pc_stats;
  std::string pc_population;
  std::optional<int> pc_year;
  auto* pc_cmd = analyze_cmd->add_subcommand("per-capita", "Volume and area per capita");
  add_common(pc_cmd, pc_c);
  pc_cmd->add_option("--stats", pc_stats, "Region stats CSV")->required()
      ;
  pc_cmd->add_option("--population", pc_population, "Population CSV (region_id,year,population)")
      ;
  pc_cmd->add_option("--year", pc_year, "Population year");

  Common rk_c;
  std::string rk_table;
  std::string rk_reference;
  std::string rk_indicator;
  std::string rk_indicator_b;
  auto* rk_cmd = analyze_cmd->add_subcommand("ranking", "Pairwise ranking agreement");
  add_common(rk_cmd, rk_c);
  rk_cmd->add_option("--table", rk_table, "Input CSV")->required();
  rk_cmd->add_option("--reference", rk_reference, "Reference column")->required();
  rk_cmd->add_option("--indicator", rk_indicator, "Indicator column")->required();
  rk_cmd->add_option("--indicator-b", rk_indicator_b, "Second indicator column");

  Common vol_c;
  std::string vol_lod1;
  std::optional<double> vol_cell;
  auto* vol_cmd = analyze_cmd->add_subcommand("volume", "Volume grid and per-region totals");
  add_common(vol_cmd, vol_c);
  vol_cmd->add_option("--lod1", vol_lod1, "LoD1 features")->required();
  vol_cmd->add_option("--cell-m", vol_cell, "Grid cell size (m)");

  // pipeline
  Common pipe_c;
  auto* pipe_cmd = app.add_subcommand("pipeline", "Run every stage from a config");
  add_common(pipe_cmd, pipe_c);

  // fixture
  Common fix_c;
  auto* fix_cmd = app.add_subcommand("fixture", "Write the synthetic demo city");
  add_common(fix_cmd, fix_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (mosaic_cmd->parsed()) {
      PipelineConfig cfg = config_for(mosaic_c);
      if (!mosaic_scenes.empty()) cfg.scenes = mosaic_scenes;
      cfg.validate();
      Log log;
      with_threads(mosaic_c.threads, [&] { print_written(run_mosaic(cfg, cfg.out_dir, log)); });
      print_log(log);
    } else if (poly_cmd->parsed()) {
      PipelineConfig cfg = config_for(poly_c);
      if (!poly_prob.empty()) cfg.probability = poly_prob;
      if (!poly_builtup.empty()) cfg.builtup = poly_builtup;
      if (poly_threshold) cfg.polygonize.threshold = *poly_threshold;
      cfg.validate();
      Log log;
      with_threads(poly_c.threads, [&] {
        print_written(run_polygonize(cfg, cfg.probability, cfg.out_dir, log));
      });
      print_log(log);
    } else if (fuse_cmd->parsed()) {
      PipelineConfig cfg = config_for(fuse_c);
      if (!fuse_admin.empty()) cfg.admin_units = fuse_admin;
      for (const auto& s : fuse_sources) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ValidationError("--source expects name=path");
        cfg.footprints[source_from_string(s.substr(0, eq))] = s.substr(eq + 1);
      }
      cfg.validate();
      Log log;
      with_threads(fuse_c.threads,
                   [&] { print_written(run_fuse(cfg, fuse_psr, cfg.out_dir, log)); });
      print_log(log);
    } else if (lod1_cmd->parsed()) {
      PipelineConfig cfg = config_for(lod1_c);
      if (!lod1_heights.empty()) cfg.height_layers.assign(lod1_heights.begin(), lod1_heights.end());
      fs::path fused = lod1_fused.empty() ? cfg.out_dir / "fused.jsonl" : fs::path(lod1_fused);
      cfg.validate();
      Log log;
      with_threads(lod1_c.threads, [&] { print_written(run_lod1(cfg, fused, cfg.out_dir, log)); });
      print_log(log);
    } else if (eval_cmd->parsed()) {
      PipelineConfig cfg = config_for(eval_c);
      if (eval_cell) cfg.eval.volume.cell_m = *eval_cell;
      if (eval_pixel) cfg.eval.volume.pixel_m = *eval_pixel;
      if (eval_iou_res) cfg.eval.iou_resolution_m = *eval_iou_res;
      cfg.eval.protocol =
          eval_protocol == "area-ranked" ? ApProtocol::AreaRanked : ApProtocol::SinglePoint;
      cfg.validate(false);
      EvalReport rep;
      with_threads(eval_c.threads, [&] {
        rep = evaluate(read_footprints(eval_pred), read_footprints(eval_gt), cfg.eval);
      });
      rep.city = eval_city;
      rep.product = eval_product;
      std::cout << EvalReport::csv_header() << '\n' << rep.csv_row() << '\n';
      if (!eval_c.out.empty()) {
        std::ofstream out = open_output(fs::path(eval_c.out) / "eval.csv");
        out << EvalReport::csv_header() << '\n' << rep.csv_row() << '\n';
      }
    } else if (gc_cmd->parsed()) {
      const auto counts = read_continent_values(gc_counts, "count");
      const auto ratios = read_continent_values(gc_ratios, "n_ratio");
      const CountEstimate est = estimate_global_count(counts, ratios, gc_avg);
      std::cout << fmt::format("estimate {:.3f} B\nlow {:.3f} B\nhigh {:.3f} B\n", est.point / 1e9,
                               est.low / 1e9, est.high / 1e9);
      if (!gc_c.out.empty()) {
        write_csv(fs::path(gc_c.out) / "global_count.csv", {"bound", "buildings"},
                  {{"point", g(est.point)}, {"low", g(est.low)}, {"high", g(est.high)}});
      }
    } else if (reg_cmd->parsed()) {
      const CsvTable t = read_csv(reg_table);
      const auto x = column_values(t, reg_x, reg_table);
      const auto y = column_values(t, reg_y, reg_table);
      const auto r = loglog_regression(x, y);
      if (!r) throw ValidationError("regression undefined: fewer than 2 usable pairs or no variance");
      std::cout << fmt::format(
          "slope {}\nintercept {}\npearson_r {}\nspearman_rho {}\nn {}\nexcluded {}\n", r->slope,
          r->intercept, r->pearson_r, r->spearman_rho, r->n, r->excluded);
      if (!reg_c.out.empty()) {
        const fs::path dir(reg_c.out);
        write_csv(dir / "regression.csv",
                  {"slope", "intercept", "pearson_r", "spearman_rho", "n", "excluded"},
                  {{g(r->slope), g(r->intercept), g(r->pearson_r), g(r->spearman_rho),
                    std::to_string(r->n), std::to_string(r->excluded)}});
        std::vector<std::vector<std::string>> pts;
        for (std::size_t i = 0; i < x.size(); ++i) {
          if (x[i] <= 0.0 || y[i] <= 0.0) continue;
          const double lx = std::log(x[i]);
          pts.push_back({g(x[i]), g(y[i]), g(lx), g(std::log(y[i])),
                         g(r->intercept + r->slope * lx)});
        }
        write_csv(dir / "regression_points.csv", {"x", "y", "ln_x", "ln_y", "fitted_ln_y"}, pts);
      }
    } else if (pc_cmd->parsed()) {
      const CsvTable t = read_csv(pc_stats);
      const std::size_t id = t.column("region_id");
      const auto vol = column_values(t, "total_volume_m3", pc_stats);
      const auto area = column_values(t, "total_area_m2", pc_stats);
      std::map<std::string, double> pop;
      if (!pc_population.empty()) {
        pop = read_region_values(pc_population, "population", pc_year);
      } else if (auto pi = t.find_column("population")) {
        for (const auto& r : t.rows) {
          if (!r[*pi].empty()) pop[r[id]] = parse_number(r[*pi], pc_stats);
        }
      }
      std::vector<RegionStats> stats;
      for (std::size_t i = 0; i < t.rows.size(); ++i) {
        RegionStats s;
        s.region_id = t.rows[i][id];
        s.total_volume_m3 = vol[i];
        s.total_area_m2 = area[i];
        if (auto it = pop.find(s.region_id); it != pop.end()) s.population = it->second;
        stats.push_back(std::move(s));
      }
      PerCapitaTable pc = per_capita_indicators(stats);
      std::stable_sort(pc.rows.begin(), pc.rows.end(), [](const auto& a, const auto& b) {
        return a.volume_per_capita > b.volume_per_capita;
      });
      std::vector<std::vector<std::string>> rows;
      std::cout << "region_id,volume_per_capita,area_per_capita\n";
      for (const auto& r : pc.rows) {
        rows.push_back({r.region_id, g(r.volume_per_capita), g(r.area_per_capita)});
        std::cout << r.region_id << ',' << g(r.volume_per_capita) << ','
                  << g(r.area_per_capita) << '\n';
      }
      for (const auto& e : pc.excluded) std::cerr << "excluded (no population): " << e << '\n';
      if (!pc_c.out.empty()) {
        write_csv(fs::path(pc_c.out) / "per_capita.csv",
                  {"region_id", "volume_per_capita", "area_per_capita"}, rows);
      }
    } else if (rk_cmd->parsed()) {
      const CsvTable t = read_csv(rk_table);
      const auto ref = column_values(t, rk_reference, rk_table);
      const auto a = column_values(t, rk_indicator, rk_table);
      if (rk_indicator_b.empty()) {
        const RankingAgreement r = ranking_agreement(a, ref);
        std::cout << fmt::format("pairs {}\nagreements {}\nrate {:.4f}\n", r.pairs, r.agreements,
                                 r.rate());
      } else {
        const auto b = column_values(t, rk_indicator_b, rk_table);
        const AgreementDecomposition d = agreement_decomposition(a, b, ref);
        std::cout << fmt::format(
            "pairs {}\nboth {}\nonly_{} {}\nonly_{} {}\nneither {}\ntotal_{} {} ({:.1f}%)\n"
            "total_{} {} ({:.1f}%)\n",
            d.pairs, d.both, rk_indicator, d.only_a, rk_indicator_b, d.only_b, d.neither,
            rk_indicator, d.total_a(), 100.0 * d.rate_a(), rk_indicator_b, d.total_b(),
            100.0 * d.rate_b());
        if (!rk_c.out.empty()) {
          write_csv(fs::path(rk_c.out) / "ranking_agreement.csv",
                    {"indicator", "agree_with_other", "only_this", "total_correct", "pairs",
                     "rate"},
                    {{rk_indicator, std::to_string(d.both), std::to_string(d.only_a),
                      std::to_string(d.total_a()), std::to_string(d.pairs), g(d.rate_a())},
                     {rk_indicator_b, std::to_string(d.both), std::to_string(d.only_b),
                      std::to_string(d.total_b()), std::to_string(d.pairs), g(d.rate_b())}});
        }
      }
    } else if (vol_cmd->parsed()) {
      PipelineConfig cfg = config_for(vol_c);
      if (vol_cell) cfg.volume_cell_m = *vol_cell;
      cfg.validate();
      Log log;
      with_threads(vol_c.threads,
                   [&] { print_written(run_analyze(cfg, vol_lod1, cfg.out_dir, log)); });
      print_log(log);
    } else if (pipe_cmd->parsed()) {
      if (pipe_c.config.empty()) throw ValidationError("pipeline needs --config");
      const PipelineConfig cfg = config_for(pipe_c);
      Log log;
      with_threads(pipe_c.threads, [&] { print_written(run_pipeline(cfg, cfg.out_dir, log)); });
      print_log(log);
    } else if (fix_cmd->parsed()) {
      const fs::path dir = fix_c.out.empty() ? fs::path("fixture") : fs::path(fix_c.out);
      const FixtureCity city = write_fixture_city(dir, fix_c.seed.value_or(7));
      std::cout << city.config.string() << '\n';
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
