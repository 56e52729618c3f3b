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
#include <optional>
#include <span>
#include <vector>

#include "gba/raster.hpp"

namespace gba::io {

enum class SampleType { UInt8, Int16, UInt16, Int32, Float32, Float64 };

enum class Compression { None, Deflate };

struct RasterWriteOptions {
  std::optional<SampleType> sample_type;  // default per semantic
  Compression compression = Compression::Deflate;
  int tile_size = 256;  // multiple of 16
};

/// UInt8 for masks and class rasters, Float64 otherwise.
SampleType default_sample_type(Semantic s);

/// Tiled GeoTIFF with pixel-scale/tiepoint georeferencing, a GDAL nodata
/// tag, and the semantic and CRS in the image description. Bands must
/// share grid, semantic and nodata. Values must be representable in the
/// sample type (ValidationError otherwise); IoError on write failure.
void write_raster(const std::filesystem::path& path, const RasterGrid& raster,
                  const RasterWriteOptions& opts = {});
void write_raster_bands(const std::filesystem::path& path,
                        std::span<const RasterGrid> bands,
                        const RasterWriteOptions& opts = {});

/// Reads every band of a tiled or stripped GeoTIFF. The semantic comes
/// from `semantic` if given, else from the image description, else
/// HeightMeters. Throws IoError for unreadable files or missing
/// georeferencing.
std::vector<RasterGrid> read_raster_bands(const std::filesystem::path& path,
                                          std::optional<Semantic> semantic = std::nullopt);

/// Single-band read; IoError for multi-band files.
RasterGrid read_raster(const std::filesystem::path& path,
                       std::optional<Semantic> semantic = std::nullopt);

}  // namespace gba::io
