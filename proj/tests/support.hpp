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

// Shared fixtures and brute-force oracles for the unit and acceptance
// suites. Oracles here never call the routine they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "gba/geometry.hpp"
#include "gba/raster.hpp"
#include "gba/synthetic.hpp"

namespace gba::test {

struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  [[nodiscard]] double area() const { return (x1 - x0) * (y1 - y0); }
  [[nodiscard]] bool contains(double x, double y) const {
    return x > x0 && x < x1 && y > y0 && y < y1;
  }
};

inline Rect rect_of(const GeoPolygon& g) {
  const Box& b = g.bbox();
  return {b.min_x, b.min_y, b.max_x, b.max_y};
}

inline double rect_overlap(const Rect& a, const Rect& b) {
  const double w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const double h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  return (w > 0.0 && h > 0.0) ? w * h : 0.0;
}

/// Planar grid of 1 m cells with its upper-left corner at (x0, y0 + size).
inline GridSpec metre_lattice(int size, double x0 = 0.0, double y0 = 0.0) {
  return GridSpec{x0, y0 + size, 1.0, 1.0, size, size, Crs::Planar};
}

/// Non-overlapping axis-aligned rectangles with integer-metre corners.
inline std::vector<FootprintRecord> planar_town(std::uint64_t seed, int count, int size,
                                                const std::string& prefix = "gt",
                                                double x0 = 0.0, double y0 = 0.0) {
  TownOptions o;
  o.lattice = metre_lattice(size, x0, y0);
  o.count = count;
  o.min_side_px = 4;
  o.max_side_px = 24;
  o.gap_px = 1;
  o.min_height_m = 2.0;
  o.max_height_m = 45.0;
  o.id_prefix = prefix;
  return make_town(seed, o);
}

inline FootprintRecord rect_record(const std::string& id, double x0, double y0, double x1,
                                   double y1, std::optional<double> h = std::nullopt,
                                   Crs crs = Crs::Planar) {
  return FootprintRecord{id, GeoPolygon::rectangle(x0, y0, x1, y1, crs), Source::Other, "", h,
                         std::nullopt};
}

/// Prediction derived from a reference town: drops some buildings, shifts
/// or resizes others by whole metres, perturbs heights and adds spurious
/// buildings. Ids are "<prefix>_<n>" in a shuffled order.
inline std::vector<FootprintRecord> perturb_town(const std::vector<FootprintRecord>& gt,
                                                 std::uint64_t seed, int size,
                                                 const std::string& prefix = "pr") {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> shift(-6, 6);
  std::vector<FootprintRecord> out;
  for (const FootprintRecord& g : gt) {
    const double roll = u(rng);
    if (roll < 0.1) continue;
    Rect r = rect_of(g.geometry);
    if (roll < 0.5) {
      r.x0 += shift(rng);
      r.x1 += shift(rng);
      r.y0 += shift(rng);
      r.y1 += shift(rng);
      if (r.x1 - r.x0 < 2.0) r.x1 = r.x0 + 2.0;
      if (r.y1 - r.y0 < 2.0) r.y1 = r.y0 + 2.0;
    }
    std::optional<double> h = g.height_m;
    if (u(rng) < 0.85) {
      h = std::max(0.0, *h + std::round(8.0 * (u(rng) - 0.5) * 4.0) / 4.0);
    } else if (u(rng) < 0.5) {
      h.reset();
    } else {
      h = 0.5;  // below the validity threshold
    }
    out.push_back(rect_record("", r.x0, r.y0, r.x1, r.y1, h));
  }
  std::uniform_int_distribution<int> pos(0, size - 10);
  const int spurious = static_cast<int>(gt.size() / 10);
  for (int i = 0; i < spurious; ++i) {
    const double x = pos(rng);
    const double y = pos(rng);
    out.push_back(rect_record("", x, y, x + 5, y + 7, 6.0));
  }
  std::shuffle(out.begin(), out.end(), rng);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = prefix + "_" + std::to_string(i);
  return out;
}

/// Per-pixel point-in-polygon rasterisation, later polygons win.
inline std::vector<double> oracle_burn(const std::vector<GeoPolygon>& polys, const GridSpec& g,
                                       const std::vector<double>& values = {}) {
  std::vector<double> out(g.size(), 0.0);
  for (int r = 0; r < g.height; ++r) {
    for (int c = 0; c < g.width; ++c) {
      const Point p = g.center({r, c});
      for (std::size_t i = 0; i < polys.size(); ++i) {
        if (polys[i].contains(p)) out[static_cast<std::size_t>(r) * g.width + c] =
            values.empty() ? 1.0 : values[i];
      }
    }
  }
  return out;
}

/// Window max filter by direct enumeration.
inline std::vector<double> oracle_dilate(const RasterGrid& m, int rx, int ry) {
  const int w = m.width();
  const int h = m.height();
  std::vector<double> out(m.values().size(), 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double v = 0.0;
      for (int dr = -ry; dr <= ry && v == 0.0; ++dr) {
        for (int dc = -rx; dc <= rx; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr >= 0 && rr < h && cc >= 0 && cc < w && m.at(rr, cc) == 1.0) {
            v = 1.0;
            break;
          }
        }
      }
      out[static_cast<std::size_t>(r) * w + c] = v;
    }
  }
  return out;
}

/// Window min filter over in-grid pixels by direct enumeration.
inline std::vector<double> oracle_erode(const RasterGrid& m, int rx, int ry) {
  const int w = m.width();
  const int h = m.height();
  std::vector<double> out(m.values().size(), 0.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double v = 1.0;
      for (int dr = -ry; dr <= ry; ++dr) {
        for (int dc = -rx; dc <= rx; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr >= 0 && rr < h && cc >= 0 && cc < w && m.at(rr, cc) != 1.0) v = 0.0;
        }
      }
      out[static_cast<std::size_t>(r) * w + c] = v;
    }
  }
  return out;
}

/// Per-row distance (in columns) to the nearest set pixel, then a vertical
/// scan: a pixel is within the (rx, ry) window of the mask iff some row
/// within ry has a set pixel within rx columns.
inline std::vector<bool> oracle_within_window(const RasterGrid& m, int rx, int ry) {
  const int w = m.width();
  const int h = m.height();
  const int inf = 1 << 29;
  std::vector<int> dx(static_cast<std::size_t>(w) * h, inf);
  for (int r = 0; r < h; ++r) {
    int last = -inf;
    for (int c = 0; c < w; ++c) {
      if (m.at(r, c) == 1.0) last = c;
      dx[static_cast<std::size_t>(r) * w + c] = last == -inf ? inf : c - last;
    }
    last = inf;
    for (int c = w - 1; c >= 0; --c) {
      if (m.at(r, c) == 1.0) last = c;
      auto& d = dx[static_cast<std::size_t>(r) * w + c];
      if (last != inf) d = std::min(d, last - c);
    }
  }
  std::vector<bool> out(dx.size(), false);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      for (int rr = std::max(0, r - ry); rr <= std::min(h - 1, r + ry); ++rr) {
        if (dx[static_cast<std::size_t>(rr) * w + c] <= rx) {
          out[static_cast<std::size_t>(r) * w + c] = true;
          break;
        }
      }
    }
  }
  return out;
}

/// 4-connected component count by breadth-first flood fill.
inline int oracle_components(const RasterGrid& m) {
  const int w = m.width();
  const int h = m.height();
  std::vector<int> label(static_cast<std::size_t>(w) * h, 0);
  int n = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (m.at(r, c) != 1.0 || label[static_cast<std::size_t>(r) * w + c]) continue;
      ++n;
      std::deque<std::pair<int, int>> q{{r, c}};
      label[static_cast<std::size_t>(r) * w + c] = n;
      while (!q.empty()) {
        auto [cr, cc] = q.front();
        q.pop_front();
        const int nb[4][2] = {{cr - 1, cc}, {cr + 1, cc}, {cr, cc - 1}, {cr, cc + 1}};
        for (const auto& p : nb) {
          if (p[0] < 0 || p[0] >= h || p[1] < 0 || p[1] >= w) continue;
          auto& l = label[static_cast<std::size_t>(p[0]) * w + p[1]];
          if (m.at(p[0], p[1]) == 1.0 && !l) {
            l = n;
            q.emplace_back(p[0], p[1]);
          }
        }
      }
    }
  }
  return n;
}

struct OraclePair {
  std::size_t pred;
  std::size_t gt;
  double overlap;
  double iou;
};

/// Greedy max-overlap matching of axis-aligned rectangles with analytic
/// overlaps; repeatedly takes the best remaining pair.
inline std::vector<OraclePair> oracle_match(const std::vector<FootprintRecord>& pred,
                                            const std::vector<FootprintRecord>& gt) {
  struct Cand {
    double overlap;
    std::string pid;
    std::string gid;
    std::size_t p;
    std::size_t g;
  };
  std::vector<Cand> cand;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const Rect a = rect_of(pred[i].geometry);
    for (std::size_t j = 0; j < gt.size(); ++j) {
      const double ov = rect_overlap(a, rect_of(gt[j].geometry));
      if (ov > 0.0) cand.push_back({ov, pred[i].id, gt[j].id, i, j});
    }
  }
  std::vector<OraclePair> out;
  std::vector<bool> pu(pred.size(), false);
  std::vector<bool> gu(gt.size(), false);
  while (true) {
    const Cand* best = nullptr;
    for (const Cand& c : cand) {
      if (pu[c.p] || gu[c.g]) continue;
      if (!best || c.overlap > best->overlap ||
          (c.overlap == best->overlap &&
           std::tie(c.pid, c.gid) < std::tie(best->pid, best->gid))) {
        best = &c;
      }
    }
    if (!best) break;
    pu[best->p] = true;
    gu[best->g] = true;
    const double uni =
        rect_of(pred[best->p].geometry).area() + rect_of(gt[best->g].geometry).area() -
        best->overlap;
    out.push_back({best->p, best->g, best->overlap, best->overlap / uni});
  }
  return out;
}

/// Volume error by explicit loops over 1 m pixels of the joint bounding
/// box (extended to whole cells). Rectangles must have integer-metre
/// corners relative to the box; each pixel takes the tallest prism
/// covering it. Per-cell differences are scaled to m^3 per 100 m^2.
inline std::pair<double, double> oracle_volume_error(const std::vector<FootprintRecord>& pred,
                                                     const std::vector<FootprintRecord>& gt,
                                                     int cell_px = 10) {
  double minx = 1e300;
  double miny = 1e300;
  double maxx = -1e300;
  double maxy = -1e300;
  for (const auto* set : {&pred, &gt}) {
    for (const auto& r : *set) {
      const Rect q = rect_of(r.geometry);
      minx = std::min(minx, q.x0);
      miny = std::min(miny, q.y0);
      maxx = std::max(maxx, q.x1);
      maxy = std::max(maxy, q.y1);
    }
  }
  const int cw = std::max(1, static_cast<int>(std::ceil((maxx - minx) / cell_px)));
  const int ch = std::max(1, static_cast<int>(std::ceil((maxy - miny) / cell_px)));
  const int w = cw * cell_px;
  const int h = ch * cell_px;
  auto paint = [&](const std::vector<FootprintRecord>& set) {
    std::vector<double> px(static_cast<std::size_t>(w) * h, 0.0);
    for (const auto& r : set) {
      const Rect q = rect_of(r.geometry);
      const auto c0 = std::lround(q.x0 - minx);
      const auto c1 = std::lround(q.x1 - minx);
      const auto r0 = std::lround(maxy - q.y1);
      const auto r1 = std::lround(maxy - q.y0);
      for (long y = r0; y < r1; ++y) {
        for (long x = c0; x < c1; ++x) {
          auto& v = px[static_cast<std::size_t>(y) * w + x];
          v = std::max(v, r.height_m.value_or(0.0));
        }
      }
    }
    return px;
  };
  const auto hp = paint(pred);
  const auto hg = paint(gt);
  double se = 0.0;
  double ae = 0.0;
  for (int cy = 0; cy < ch; ++cy) {
    for (int cx = 0; cx < cw; ++cx) {
      double diff = 0.0;
      for (int py = 0; py < cell_px; ++py) {
        for (int pxi = 0; pxi < cell_px; ++pxi) {
          const std::size_t i =
              static_cast<std::size_t>(cy * cell_px + py) * w + cx * cell_px + pxi;
          diff += hp[i] - hg[i];
        }
      }
      const double e = diff * 100.0 / (cell_px * cell_px);
      se += e * e;
      ae += std::abs(e);
    }
  }
  const double n = static_cast<double>(cw) * ch;
  return {std::sqrt(se / n), ae / n};
}

/// Three series over n regions against the reference order 0..n-1, built
/// so that exactly `neither` pairs are misordered by both indicators,
/// `only_a` pairs are ordered correctly by a alone and `only_b` by b alone.
/// Misordered pairs come from reversed runs of consecutive regions; a run
/// of k contributes k(k-1)/2 pairs.
struct RankingFixture {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> reference;
};

inline RankingFixture ranking_fixture(int n, std::uint64_t neither, std::uint64_t only_a,
                                      std::uint64_t only_b) {
  auto runs = [](std::uint64_t pairs) {
    std::vector<int> out;
    while (pairs > 0) {
      int k = 2;
      while (static_cast<std::uint64_t>(k + 1) * k / 2 <= pairs) ++k;
      out.push_back(k);
      pairs -= static_cast<std::uint64_t>(k) * (k - 1) / 2;
    }
    return out;
  };
  RankingFixture f;
  for (int i = 0; i < n; ++i) {
    f.a.push_back(i);
    f.b.push_back(i);
    f.reference.push_back(i);
  }
  int start = 0;
  auto reverse_run = [&](std::vector<double>& v, int k) {
    if (start + k > n) throw std::runtime_error("ranking fixture does not fit");
    std::reverse(v.begin() + start, v.begin() + start + k);
  };
  for (int k : runs(neither)) {
    reverse_run(f.a, k);
    reverse_run(f.b, k);
    start += k;
  }
  // a wrong, b right: these pairs count for b only.
  for (int k : runs(only_b)) {
    reverse_run(f.a, k);
    start += k;
  }
  for (int k : runs(only_a)) {
    reverse_run(f.b, k);
    start += k;
  }
  return f;
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 1e-12) {
  return std::abs(a - b) <= std::max(abs_floor, rel * std::max(std::abs(a), std::abs(b)));
}

}  // namespace gba::test
