# Copyright 2026 The gbatlas Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Building footprints, LoD1 prisms and country statistics."""

from gbatlas._core import (
    Error,
    FootprintRecord,
    GeoPolygon,
    GridSpec,
    IoError,
    Lod1Record,
    RasterGrid,
    ValidationError,
    assign_height,
    estimate_global_count,
    evaluate,
    loglog_regression,
    merge,
    ranking_agreement,
    rasterize,
    read_footprints,
    read_raster,
    run_pipeline,
    spearman,
    threshold_mask,
    tile_of,
    trace_polygons,
    write_fixture_city,
    write_footprints,
    write_raster,
)

__version__ = "0.1.0"

__all__ = [
    "Error",
    "FootprintRecord",
    "GeoPolygon",
    "GridSpec",
    "IoError",
    "Lod1Record",
    "RasterGrid",
    "ValidationError",
    "assign_height",
    "estimate_global_count",
    "evaluate",
    "loglog_regression",
    "merge",
    "ranking_agreement",
    "rasterize",
    "read_footprints",
    "read_raster",
    "run_pipeline",
    "spearman",
    "threshold_mask",
    "tile_of",
    "trace_polygons",
    "write_fixture_city",
    "write_footprints",
    "write_raster",
]
