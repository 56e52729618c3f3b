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
#include "gba/io/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <optional>

#include <fmt/format.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "gba/analytics.hpp"
#include "gba/error.hpp"
#include "gba/fusion.hpp"
#include "gba/io/features.hpp"
#include "gba/io/raster_io.hpp"
#include "gba/io/tables.hpp"
#include "gba/lod1.hpp"
#include "gba/metrics.hpp"
#include "gba/polygonize.hpp"
#include "gba/tiling.hpp"

namespace gba::io {

namespace fs = std::filesystem;

int default_threads() {
  if (const char* env = std::getenv("GBA_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0 && n <= 1024) return static_cast<int>(n);
  }
  return 1;
}

void with_threads(int threads, const std::function<void()>& fn) {
  if (threads < 1) throw ValidationError("thread count must be at least 1");
  tbb::task_arena arena(threads);
  arena.execute(fn);
}

namespace {

std::string num(double v) { return fmt::format("{}", v); }

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string tile_tag(const PipelineConfig& cfg, const GridSpec& grid) {
  if (cfg.tile) return cfg.tile->tag();
  if (grid.crs == Crs::Geographic) {
    const Point c = grid.bounds().center();
    return tile_of(c.x, c.y).tag();
  }
  return "local";
}

}  // namespace

StageFiles run_mosaic(const PipelineConfig& cfg, const fs::path& out_dir, Log& log) {
  if (cfg.scenes.empty()) throw MissingInput("mosaic.scenes is not configured");
  std::vector<SceneEntry> scenes;
  for (const SceneRow& row : read_scene_table(cfg.scenes)) {
    SceneEntry e{row.scene_id,
                 read_raster(row.path),
                 read_raster(row.mask_path, Semantic::BinaryMask),
                 row.cloud_fraction,
                 row.year,
                 row.doy,
                 0};
    e.validate();
    scenes.push_back(std::move(e));
  }
  const std::size_t listed = scenes.size();
  scenes = filter_scenes(std::move(scenes), cfg.scene_filter);
  if (scenes.empty()) throw MissingInput("no scene passes the cloud and year filter");
  assign_priorities(scenes);
  const GridSpec target = cfg.grid.value_or(scenes.front().raster.spec());
  const RasterGrid out = mosaic(scenes, target, scenes.front().raster.nodata());
  const fs::path path = out_dir / "mosaic.tif";
  write_raster(path, out);
  log.push_back(fmt::format("mosaic: {} of {} scenes used, {} valid pixels", scenes.size(),
                            listed,
                            std::count_if(out.values().begin(), out.values().end(),
                                          [&](double v) { return !out.is_nodata(v); })));
  return {{path}};
}

StageFiles run_polygonize(const PipelineConfig& cfg, const fs::path& probability,
                          const fs::path& out_dir, Log& log) {
  if (probability.empty()) throw MissingInput("no probability raster given");
  const RasterGrid prob = read_raster(probability, Semantic::Probability);
  std::optional<RasterGrid> builtup;
  if (!cfg.builtup.empty()) builtup = read_raster(cfg.builtup, Semantic::BinaryMask);
  const std::string tag = tile_tag(cfg, prob.spec());

  FilterReport rep;
  if (cfg.tile && builtup && select_tiles(*builtup, {*cfg.tile}).empty()) {
    log.push_back("polygonize: tile " + tag + " has no built-up pixels, skipped");
  } else {
    rep = polygonize_raster(prob, builtup ? &*builtup : nullptr, cfg.polygonize, tag);
  }
  const fs::path path = out_dir / "psr.jsonl";
  const fs::path removed = out_dir / "psr_removed.csv";
  const std::size_t kept = rep.kept.size();
  write_footprints(path, std::move(rep.kept), {{"tile", tag}});
  std::vector<std::vector<std::string>> rows;
  std::sort(rep.removed_ids.begin(), rep.removed_ids.end());
  for (const auto& id : rep.removed_ids) rows.push_back({id});
  write_csv(removed, {"id"}, rows);
  log.push_back(fmt::format("polygonize: {} polygons kept, {} removed as false positives", kept,
                            rep.removed_ids.size()));
  return {{path, removed}};
}

StageFiles run_fuse(const PipelineConfig& cfg, const fs::path& psr, const fs::path& out_dir,
                    Log& log) {
  if (cfg.admin_units.empty()) throw MissingInput("fusion.admin_units is not configured");
  const std::vector<AdminUnit> units = read_admin_units(cfg.admin_units);

  std::map<Source, fs::path> inputs = cfg.footprints;
  if (!psr.empty()) inputs[Source::PSRDerived] = psr;
  if (inputs.empty()) throw MissingInput("no footprint sources configured");

  std::vector<std::vector<std::string>> rejected;
  std::vector<SourceMap> per_unit(units.size());
  std::size_t unassigned = 0;
  for (const auto& [src, path] : inputs) {
    FeatureReadReport report;
    auto records = read_footprints(path, src, &report);
    for (const Rejection& r : report.rejected) {
      rejected.push_back({path.filename().string(), std::to_string(r.ordinal), r.id, r.reason});
    }
    const auto owner = assign_to_units(records, units);
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (!owner[i]) {
        ++unassigned;
        continue;
      }
      per_unit[*owner[i]][src].push_back(std::move(records[i]));
    }
  }

  std::vector<FusionResult> results(units.size());
  tbb::parallel_for(std::size_t{0}, units.size(), [&](std::size_t u) {
    results[u] = fuse_admin(units[u], per_unit[u], cfg.overlap_threshold);
  });

  std::vector<FootprintRecord> fused;
  std::vector<std::vector<std::string>> contrib;
  for (std::size_t u = 0; u < units.size(); ++u) {
    for (auto& r : results[u].records) fused.push_back(std::move(r));
    for (const ContributionRow& c : results[u].report) {
      contrib.push_back({c.admin_id, c.source, std::to_string(c.count), num(c.area_m2)});
    }
    log.push_back(fmt::format(
        "fuse: {} base {} secondary {}", units[u].admin_id,
        results[u].base ? std::string(to_string(*results[u].base)) : "-",
        results[u].secondary ? std::string(to_string(results[u].secondary->source)) : "-"));
  }
  std::sort(contrib.begin(), contrib.end());
  const fs::path path = out_dir / "fused.jsonl";
  const fs::path report = out_dir / "contributions.csv";
  const fs::path rej = out_dir / "rejected.csv";
  const std::size_t n = fused.size();
  write_footprints(path, std::move(fused));
  write_csv(report, {"admin_id", "source", "count", "area_m2"}, contrib);
  write_csv(rej, {"file", "ordinal", "id", "reason"}, rejected);
  log.push_back(fmt::format("fuse: {} records, {} outside every admin unit, {} rejected", n,
                            unassigned, rejected.size()));
  return {{path, report, rej}};
}

StageFiles run_lod1(const PipelineConfig& cfg, const fs::path& fused, const fs::path& out_dir,
                    Log& log) {
  if (cfg.height_layers.empty()) throw MissingInput("lod1.height_layers is not configured");
  std::vector<RasterGrid> layers;
  for (const auto& p : cfg.height_layers) layers.push_back(read_raster(p, Semantic::HeightMeters));
  const PredictionStack stack(std::move(layers));
  const auto [mean, var] = tta_aggregate(stack);
  const auto footprints = read_footprints(fused);
  Lod1Build build = build_lod1(footprints, mean, var, cfg.min_height_m);

  const fs::path features = out_dir / "lod1.jsonl";
  const fs::path table = out_dir / "lod1.csv";
  const fs::path mean_path = out_dir / "height_mean.tif";
  const fs::path var_path = out_dir / "height_variance.tif";
  write_raster(mean_path, mean);
  write_raster(var_path, var);
  log.push_back(fmt::format("lod1: {} prisms, completeness {}", build.records.size(),
                            build.completeness ? fmt::format("{:.4f}", *build.completeness)
                                               : std::string("n/a")));
  write_lod1_table(table, build.records);
  write_lod1(features, std::move(build.records));
  return {{features, table, mean_path, var_path}};
}

StageFiles run_eval(const PipelineConfig& cfg, const fs::path& prediction, const fs::path& out_dir,
                    Log& log) {
  if (cfg.reference.empty()) throw MissingInput("eval.reference is not configured");
  const auto pred = to_footprints(read_lod1(prediction));
  const auto gt = read_footprints(cfg.reference);
  EvalReport rep = evaluate(pred, gt, cfg.eval);
  rep.city = cfg.city;
  rep.product = "GBA.LoD1";
  const fs::path path = out_dir / "eval.csv";
  std::ofstream out = open_output(path);
  out << EvalReport::csv_header() << '\n' << rep.csv_row() << '\n';
  if (!out) throw IoError("write failed: " + path.string());
  log.push_back("eval: " + rep.csv_row());
  return {{path}};
}

StageFiles run_analyze(const PipelineConfig& cfg, const fs::path& lod1, const fs::path& out_dir,
                       Log& log) {
  const auto records = read_lod1(lod1);
  const VolumeGrid vg = grid_volume(records, cfg.volume_cell_m);
  std::vector<RegionStats> stats = aggregate_by_region(records);
  if (!cfg.population.empty()) {
    const auto pop = read_region_values(cfg.population, "population");
    for (RegionStats& s : stats) {
      if (auto it = pop.find(s.region_id); it != pop.end()) s.population = it->second;
    }
  }
  const PerCapitaTable pc = per_capita_indicators(stats);
  std::map<std::string, PerCapitaRow> pc_rows;
  for (const auto& r : pc.rows) pc_rows[r.region_id] = r;

  std::vector<std::vector<std::string>> rows;
  for (const RegionStats& s : stats) {
    const auto it = pc_rows.find(s.region_id);
    const bool has = it != pc_rows.end();
    rows.push_back({s.region_id, std::to_string(s.building_count), num(s.total_area_m2),
                    num(s.total_volume_m3), opt_num(s.population),
                    has ? num(it->second.volume_per_capita) : "",
                    has ? num(it->second.area_per_capita) : ""});
  }
  const fs::path grid_path = out_dir / "volume_grid.tif";
  const fs::path stats_path = out_dir / "region_stats.csv";
  write_raster(grid_path, vg.grid);
  write_csv(stats_path,
            {"region_id", "building_count", "total_area_m2", "total_volume_m3", "population",
             "volume_per_capita", "area_per_capita"},
            rows);
  log.push_back(fmt::format("analyze: {} regions, volume grid {}x{} cells of {} m",
                            stats.size(), vg.grid.width(), vg.grid.height(), cfg.volume_cell_m));
  return {{grid_path, stats_path}};
}

StageFiles run_pipeline(const PipelineConfig& cfg, const fs::path& out_dir, Log& log) {
  cfg.validate();
  StageFiles all;
  auto add = [&](const StageFiles& s) {
    all.written.insert(all.written.end(), s.written.begin(), s.written.end());
  };
  fs::path probability = cfg.probability;
  if (!cfg.scenes.empty()) {
    add(run_mosaic(cfg, out_dir, log));
    probability = out_dir / "mosaic.tif";
  }
  fs::path psr;
  if (!probability.empty() && cfg.include_psr) {
    add(run_polygonize(cfg, probability, out_dir, log));
    psr = out_dir / "psr.jsonl";
  }
  add(run_fuse(cfg, psr, out_dir, log));
  if (cfg.height_layers.empty()) return all;
  add(run_lod1(cfg, out_dir / "fused.jsonl", out_dir, log));
  if (!cfg.reference.empty()) add(run_eval(cfg, out_dir / "lod1.jsonl", out_dir, log));
  add(run_analyze(cfg, out_dir / "lod1.jsonl", out_dir, log));
  return all;
}

}  // namespace gba::io
