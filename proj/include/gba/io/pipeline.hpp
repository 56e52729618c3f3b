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

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "gba/io/config.hpp"

namespace gba::io {

/// Progress messages collected by the stage runners.
using Log = std::vector<std::string>;

/// Thread count from GBA_THREADS, else 1.
int default_threads();

/// Runs `fn` inside a TBB arena limited to `threads` workers.
void with_threads(int threads, const std::function<void()>& fn);

struct StageFiles {
  std::vector<std::filesystem::path> written;
};

/// Prioritised mosaic of the scene table onto the configured grid (or the
/// first usable scene's grid): mosaic.tif.
StageFiles run_mosaic(const PipelineConfig& cfg, const std::filesystem::path& out_dir, Log& log);

/// Probability raster to simplified, filtered polygons: psr.jsonl and
/// psr_removed.csv. Skips tiles without built-up pixels when a tile is set.
StageFiles run_polygonize(const PipelineConfig& cfg, const std::filesystem::path& probability,
                          const std::filesystem::path& out_dir, Log& log);

/// Per admin unit fusion of the configured sources (plus `psr` when not
/// empty): fused.jsonl, contributions.csv, rejected.csv.
StageFiles run_fuse(const PipelineConfig& cfg, const std::filesystem::path& psr,
                    const std::filesystem::path& out_dir, Log& log);

/// TTA aggregation and height assignment: lod1.jsonl, lod1.csv,
/// height_mean.tif, height_variance.tif.
StageFiles run_lod1(const PipelineConfig& cfg, const std::filesystem::path& fused,
                    const std::filesystem::path& out_dir, Log& log);

/// Metric row of the LoD1 prediction against the reference: eval.csv.
StageFiles run_eval(const PipelineConfig& cfg, const std::filesystem::path& prediction,
                    const std::filesystem::path& out_dir, Log& log);

/// Volume grid and per-region totals: volume_grid.tif, region_stats.csv.
StageFiles run_analyze(const PipelineConfig& cfg, const std::filesystem::path& lod1,
                       const std::filesystem::path& out_dir, Log& log);

/// All stages in order. The probability raster is the mosaic when a scene
/// table is configured, else cfg.probability.
StageFiles run_pipeline(const PipelineConfig& cfg, const std::filesystem::path& out_dir,
                        Log& log);

}  // namespace gba::io
