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
#include "gba/polygonize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>

#include <fmt/format.h>
#include <tbb/parallel_for.h>

#include "gba/error.hpp"
#include "gba/planar.hpp"
#include "gba/raster_ops.hpp"

namespace gba {

void SimplifyParams::validate() const {
  if (!(tolerance_m >= 0.0)) throw ValidationError("tolerance_m must be >= 0");
  if (!(min_area_m2 >= 0.0)) throw ValidationError("min_area_m2 must be >= 0");
  if (min_ring_vertices < 4) throw ValidationError("min_ring_vertices must be >= 4");
}

RasterGrid threshold_mask(const RasterGrid& prob, double t) {
  require_semantic(prob, Semantic::Probability);
  if (!(t > 0.0 && t < 1.0)) throw ValidationError("threshold must be in (0, 1)");
  std::vector<double> out(prob.values().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double v = prob.values()[i];
    out[i] = (!prob.is_nodata(v) && v >= t) ? 1.0 : 0.0;
  }
  return RasterGrid(prob.spec(), Semantic::BinaryMask, 0.0, std::move(out));
}

RasterGrid regularize_mask(const RasterGrid& mask) {
  require_semantic(mask, Semantic::BinaryMask);
  RasterGrid opened = dilate_pixels(erode_pixels(mask, 1, 1), 1, 1);
  return erode_pixels(dilate_pixels(opened, 1, 1), 1, 1);
}

// ---------------------------------------------------------------------------
// Tracing

namespace {

struct Edge {
  int r0, c0, r1, c1;
  [[nodiscard]] int dr() const { return r1 - r0; }
  [[nodiscard]] int dc() const { return c1 - c0; }
};

std::vector<int> label_components(const RasterGrid& mask, int& count) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<int> label(mask.values().size(), -1);
  count = 0;
  std::deque<std::pair<int, int>> queue;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = mask.index(r, c);
      if (mask.values()[i] != 1.0 || label[i] >= 0) continue;
      label[i] = count;
      queue.emplace_back(r, c);
      while (!queue.empty()) {
        const auto [qr, qc] = queue.front();
        queue.pop_front();
        constexpr int kDr[] = {-1, 1, 0, 0};
        constexpr int kDc[] = {0, 0, -1, 1};
        for (int k = 0; k < 4; ++k) {
          const int nr = qr + kDr[k];
          const int nc = qc + kDc[k];
          if (nr < 0 || nc < 0 || nr >= h || nc >= w) continue;
          const std::size_t j = mask.index(nr, nc);
          if (mask.values()[j] == 1.0 && label[j] < 0) {
            label[j] = count;
            queue.emplace_back(nr, nc);
          }
        }
      }
      ++count;
    }
  }
  return label;
}

Ring to_world(const std::vector<std::pair<int, int>>& corners,
              const GridSpec& g) {
  Ring ring;
  ring.reserve(corners.size() + 1);
  for (const auto& [r, c] : corners) {
    ring.push_back({g.origin_x + c * g.pixel_w, g.origin_y - r * g.pixel_h});
  }
  ring.push_back(ring.front());
  return ring;
}

// Removes vertices where the direction does not change.
std::vector<std::pair<int, int>> drop_straight(const std::vector<std::pair<int, int>>& corners) {
  std::vector<std::pair<int, int>> kept;
  const std::size_t n = corners.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& prev = corners[(i + n - 1) % n];
    const auto& here = corners[i];
    const auto& next = corners[(i + 1) % n];
    const int d1r = here.first - prev.first;
    const int d1c = here.second - prev.second;
    const int d2r = next.first - here.first;
    const int d2c = next.second - here.second;
    if (d1r * d2c - d1c * d2r != 0) kept.push_back(here);
  }
  return kept;
}

// Links the directed boundary edges of one component into rings. Edges are
// oriented with the component on their left (in map coordinates); at a
// vertex with two exits the walk turns left, i.e. towards the interior.
std::vector<Ring> link_edges(std::vector<Edge> edges, const GridSpec& g) {
  const std::int64_t stride = static_cast<std::int64_t>(g.width) + 1;
  auto key = [stride](int r, int c) { return static_cast<std::int64_t>(r) * stride + c; };
  std::sort(edges.begin(), edges.end(), [&](const Edge& a, const Edge& b) {
    return key(a.r0, a.c0) < key(b.r0, b.c0);
  });
  std::vector<bool> used(edges.size(), false);
  // Exits of a corner that are still free, plus `start` if it leaves there.
  auto exits = [&](int r, int c, std::size_t start) {
    const std::int64_t k = key(r, c);
    auto lo = std::lower_bound(edges.begin(), edges.end(), k,
                               [&](const Edge& e, std::int64_t v) { return key(e.r0, e.c0) < v; });
    std::vector<std::size_t> out;
    for (auto it = lo; it != edges.end() && key(it->r0, it->c0) == k; ++it) {
      const auto idx = static_cast<std::size_t>(it - edges.begin());
      if (!used[idx] || idx == start) out.push_back(idx);
    }
    return out;
  };

  std::vector<Ring> rings;
  for (std::size_t start = 0; start < edges.size(); ++start) {
    if (used[start]) continue;
    std::vector<std::pair<int, int>> corners;
    std::size_t cur = start;
    while (true) {
      used[cur] = true;
      const Edge& e = edges[cur];
      corners.emplace_back(e.r0, e.c0);
      auto next = exits(e.r1, e.c1, start);
      if (next.empty()) throw InvalidGeometry("open boundary while tracing");
      std::size_t pick = next.front();
      if (next.size() > 1) {
        const int ldr = -e.dc();
        const int ldc = e.dr();
        for (std::size_t n : next) {
          if (edges[n].dr() == ldr && edges[n].dc() == ldc) pick = n;
        }
      }
      if (pick == start) break;
      cur = pick;
    }
    // A walk that passes a corner twice touches itself; cut it there into
    // simple loops.
    std::vector<std::pair<int, int>> stack;
    std::map<std::pair<int, int>, std::size_t> seen;
    for (const auto& v : corners) {
      auto it = seen.find(v);
      if (it == seen.end()) {
        seen.emplace(v, stack.size());
        stack.push_back(v);
        continue;
      }
      std::vector<std::pair<int, int>> loop(stack.begin() + static_cast<std::ptrdiff_t>(it->second),
                                            stack.end());
      for (std::size_t k = it->second + 1; k < stack.size(); ++k) seen.erase(stack[k]);
      stack.resize(it->second + 1);
      rings.push_back(to_world(drop_straight(loop), g));
    }
    rings.push_back(to_world(drop_straight(stack), g));
  }
  return rings;
}

}  // namespace

std::vector<GeoPolygon> trace_polygons(const RasterGrid& mask) {
  require_semantic(mask, Semantic::BinaryMask);
  int count = 0;
  const std::vector<int> label = label_components(mask, count);
  const int w = mask.width();
  const int h = mask.height();

  std::vector<std::vector<Edge>> edges(static_cast<std::size_t>(count));
  auto lab = [&](int r, int c) {
    if (r < 0 || c < 0 || r >= h || c >= w) return -1;
    return label[mask.index(r, c)];
  };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int l = lab(r, c);
      if (l < 0) continue;
      auto& es = edges[static_cast<std::size_t>(l)];
      if (lab(r - 1, c) != l) es.push_back({r, c + 1, r, c});
      if (lab(r + 1, c) != l) es.push_back({r + 1, c, r + 1, c + 1});
      if (lab(r, c - 1) != l) es.push_back({r, c, r + 1, c});
      if (lab(r, c + 1) != l) es.push_back({r + 1, c + 1, r, c + 1});
    }
  }

  std::vector<GeoPolygon> out;
  out.reserve(static_cast<std::size_t>(count));
  for (auto& es : edges) {
    std::vector<Ring> rings = link_edges(std::move(es), mask.spec());
    auto ext = std::find_if(rings.begin(), rings.end(),
                            [](const Ring& r) { return signed_area(r) > 0; });
    if (ext == rings.end() ||
        std::count_if(rings.begin(), rings.end(),
                      [](const Ring& r) { return signed_area(r) > 0; }) != 1) {
      throw InvalidGeometry("component without a single exterior ring");
    }
    Ring exterior = std::move(*ext);
    rings.erase(ext);
    out.push_back(GeoPolygon::make(std::move(exterior), std::move(rings),
                                   mask.spec().crs));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Simplification

namespace {

double segment_distance(Point p, Point a, Point b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

// Marks kept vertices of the open path pts[lo..hi] (indices mod n).
void douglas_peucker(const std::vector<Point>& pts, std::size_t lo,
                     std::size_t hi, double tol, std::vector<bool>& keep) {
  const std::size_t n = pts.size();
  std::vector<std::pair<std::size_t, std::size_t>> stack{{lo, hi}};
  while (!stack.empty()) {
    const auto [a, b] = stack.back();
    stack.pop_back();
    const std::size_t span = (b + n - a) % n;
    if (span < 2) continue;
    double worst = -1.0;
    std::size_t worst_k = a;
    for (std::size_t s = 1; s < span; ++s) {
      const std::size_t k = (a + s) % n;
      const double d = segment_distance(pts[k], pts[a], pts[b]);
      if (d > worst) {
        worst = d;
        worst_k = k;
      }
    }
    if (worst > tol) {
      keep[worst_k] = true;
      stack.emplace_back(a, worst_k);
      stack.emplace_back(worst_k, b);
    }
  }
}

// Simplifies one closed ring; returns indices (into the open vertex list)
// of the vertices to keep, in ring order.
std::vector<std::size_t> simplify_ring(const std::vector<Point>& pts, double tol) {
  const std::size_t n = pts.size();
  std::vector<bool> keep(n, false);
  std::size_t far = 0;
  double best = -1.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double d = std::hypot(pts[k].x - pts[0].x, pts[k].y - pts[0].y);
    if (d > best) {
      best = d;
      far = k;
    }
  }
  keep[0] = true;
  keep[far] = true;
  douglas_peucker(pts, 0, far, tol, keep);
  douglas_peucker(pts, far, 0, tol, keep);

  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < n; ++k) {
    if (keep[k]) idx.push_back(k);
  }
  // Cyclic collinear removal; repeat until stable.
  bool changed = true;
  while (changed && idx.size() > 3) {
    changed = false;
    for (std::size_t i = 0; i < idx.size() && idx.size() > 3; ++i) {
      const Point& p = pts[idx[(i + idx.size() - 1) % idx.size()]];
      const Point& q = pts[idx[i]];
      const Point& r = pts[idx[(i + 1) % idx.size()]];
      const double cross = (q.x - p.x) * (r.y - q.y) - (q.y - p.y) * (r.x - q.x);
      const double scale = std::hypot(q.x - p.x, q.y - p.y) * std::hypot(r.x - q.x, r.y - q.y);
      const double dot = (q.x - p.x) * (r.x - q.x) + (q.y - p.y) * (r.y - q.y);
      if (std::abs(cross) <= 1e-12 * scale && dot > 0.0) {
        idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        --i;
      }
    }
  }
  return idx;
}

// Returns the simplified native ring, or nullopt if it collapsed.
std::optional<Ring> simplify_native(const Ring& ring, const LocalFrame& f,
                                    double tol, int min_vertices) {
  std::vector<Point> metric;
  metric.reserve(ring.size() - 1);
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) metric.push_back(f.to_planar(ring[i]));
  const auto idx = simplify_ring(metric, tol);
  if (static_cast<int>(idx.size()) + 1 < min_vertices || idx.size() < 3) {
    return std::nullopt;
  }
  Ring out;
  out.reserve(idx.size() + 1);
  for (std::size_t k : idx) out.push_back(ring[k]);
  out.push_back(out.front());
  if (signed_area(out) == 0.0) return std::nullopt;
  return out;
}

}  // namespace

std::optional<GeoPolygon> simplify(const GeoPolygon& p,
                                   const SimplifyParams& params) {
  params.validate();
  const LocalFrame f(p.crs(), p.centroid());
  GeoPolygon result = p;
  if (auto ext = simplify_native(p.exterior(), f, params.tolerance_m,
                                 params.min_ring_vertices)) {
    std::vector<Ring> holes;
    for (const Ring& h : p.holes()) {
      if (auto sh = simplify_native(h, f, params.tolerance_m,
                                    params.min_ring_vertices)) {
        holes.push_back(std::move(*sh));
      }
    }
    try {
      result = GeoPolygon::make(std::move(*ext), std::move(holes), p.crs());
    } catch (const InvalidGeometry&) {
      result = p;
    }
  }
  if (polygon_area_m2(result) < params.min_area_m2) return std::nullopt;
  return result;
}

// ---------------------------------------------------------------------------
// False-positive filter

FilterReport filter_false_positives(const std::vector<FootprintRecord>& polys,
                                    const RasterGrid& builtup, double radius_m) {
  require_semantic(builtup, Semantic::BinaryMask);
  const RasterGrid dilated = dilate_mask(builtup, radius_m);
  const GridSpec& g = dilated.spec();
  FilterReport report;
  for (const FootprintRecord& rec : polys) {
    std::vector<Cell> cells = covered_cells(rec.geometry, g);
    if (cells.empty()) {
      if (auto c = g.cell_of(rec.geometry.centroid())) cells.push_back(*c);
    }
    if (cells.empty()) {
      ++report.outside_extent;
      report.removed_ids.push_back(rec.id);
      continue;
    }
    const bool hit = std::any_of(cells.begin(), cells.end(), [&](const Cell& c) {
      return dilated.at(c.row, c.col) == 1.0;
    });
    if (hit) {
      report.kept.push_back(rec);
    } else {
      report.removed_ids.push_back(rec.id);
    }
  }
  return report;
}

FilterReport polygonize_raster(const RasterGrid& prob, const RasterGrid* builtup,
                               const PolygonizeOptions& opts,
                               const std::string& tag) {
  RasterGrid mask = threshold_mask(prob, opts.threshold);
  if (opts.regularize) mask = regularize_mask(mask);
  const std::vector<GeoPolygon> traced = trace_polygons(mask);
  std::vector<std::optional<GeoPolygon>> simplified(traced.size());
  tbb::parallel_for(std::size_t{0}, traced.size(), [&](std::size_t i) {
    simplified[i] = simplify(traced[i], opts.simplify);
  });
  std::vector<FootprintRecord> records;
  std::size_t n = 0;
  for (auto& simple : simplified) {
    if (!simple) continue;
    records.push_back(FootprintRecord{fmt::format("psr_{}_{:06d}", tag, n++),
                                      std::move(*simple), Source::PSRDerived,
                                      "", std::nullopt, std::nullopt});
  }
  if (builtup == nullptr) {
    FilterReport all;
    all.kept = std::move(records);
    return all;
  }
  return filter_false_positives(records, *builtup, opts.dilation_m);
}

}  // namespace gba
