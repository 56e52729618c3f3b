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
#include "gba/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include <boost/geometry/index/rtree.hpp>
#include <fmt/format.h>

#include "gba/error.hpp"
#include "gba/planar.hpp"
#include "gba/raster_ops.hpp"
#include "gba/spatial_index.hpp"

namespace gba {

namespace bgi = boost::geometry::index;

namespace {

std::optional<Box> joint_bbox(const std::vector<FootprintRecord>& a,
                              const std::vector<FootprintRecord>& b,
                              std::optional<Crs>& crs) {
  std::optional<Box> box;
  for (const auto* set : {&a, &b}) {
    for (const FootprintRecord& r : *set) {
      if (crs && *crs != r.geometry.crs()) {
        throw CrsMismatch("prediction and reference use different coordinate references");
      }
      crs = r.geometry.crs();
      if (box) {
        box->expand(r.geometry.bbox());
      } else {
        box = r.geometry.bbox();
      }
    }
  }
  return box;
}

std::vector<GeoPolygon> projected(const std::vector<FootprintRecord>& recs,
                                  const LocalFrame& f) {
  std::vector<GeoPolygon> out;
  out.reserve(recs.size());
  for (const FootprintRecord& r : recs) out.push_back(project_polygon(r.geometry, f));
  return out;
}

std::vector<double> heights_of(const std::vector<FootprintRecord>& recs) {
  std::vector<double> h;
  h.reserve(recs.size());
  for (const FootprintRecord& r : recs) h.push_back(r.height_m.value_or(0.0));
  return h;
}

// Grid over a planar box with square pixels, anchored at the box's
// upper-left corner and padded so whole `cell` multiples fit.
GridSpec grid_over(const Box& b, double pixel, int pixels_per_cell, Crs crs) {
  const double cell = pixel * pixels_per_cell;
  const int cells_x = std::max(1, static_cast<int>(std::ceil((b.max_x - b.min_x) / cell)));
  const int cells_y = std::max(1, static_cast<int>(std::ceil((b.max_y - b.min_y) / cell)));
  return GridSpec{b.min_x, b.max_y, pixel, pixel, cells_x * pixels_per_cell,
                  cells_y * pixels_per_cell, crs};
}

Box planar_bounds(const std::vector<GeoPolygon>& a, const std::vector<GeoPolygon>& b) {
  std::optional<Box> box;
  for (const auto* set : {&a, &b}) {
    for (const GeoPolygon& g : *set) {
      if (box) {
        box->expand(g.bbox());
      } else {
        box = g.bbox();
      }
    }
  }
  return box.value_or(Box{});
}

double mask_iou(std::span<const double> pred, std::span<const double> gt) {
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] == 1.0;
    const bool g = gt[i] == 1.0;
    inter += (p && g) ? 1 : 0;
    uni += (p || g) ? 1 : 0;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// Where prisms overlap the tallest one counts, independent of record order.
RasterGrid burn_prisms(const std::vector<FootprintRecord>& recs,
                       const std::vector<GeoPolygon>& projected_polys, const GridSpec& grid) {
  const auto h = heights_of(recs);
  std::vector<std::size_t> order(recs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(h[a], recs[a].id) < std::tie(h[b], recs[b].id);
  });
  std::vector<GeoPolygon> polys;
  std::vector<double> values;
  polys.reserve(order.size());
  values.reserve(order.size());
  for (std::size_t i : order) {
    polys.push_back(projected_polys[i]);
    values.push_back(h[i]);
  }
  return rasterize(std::span<const GeoPolygon>(polys), grid, values, Semantic::HeightMeters,
                   0.0, -1.0);
}

}  // namespace

MatchResult match_max_overlap(const std::vector<FootprintRecord>& pred,
                              const std::vector<FootprintRecord>& gt) {
  MatchResult result;
  std::optional<Crs> crs;
  const auto box = joint_bbox(pred, gt, crs);
  if (box && !pred.empty() && !gt.empty()) {
    const LocalFrame f = LocalFrame::around(*crs, *box);
    std::vector<PlanarPolygon> pp;
    std::vector<PlanarPolygon> gp;
    for (const auto& r : pred) pp.push_back(f.project(r.geometry));
    for (const auto& r : gt) gp.push_back(f.project(r.geometry));
    std::vector<std::pair<PlanarBox, std::size_t>> values;
    for (std::size_t j = 0; j < gp.size(); ++j) {
      values.emplace_back(bg::return_envelope<PlanarBox>(gp[j]), j);
    }
    const bgi::rtree<std::pair<PlanarBox, std::size_t>, bgi::rstar<16>> tree(
        values.begin(), values.end());

    std::vector<MatchPair> cand;
    std::vector<std::pair<PlanarBox, std::size_t>> hits;
    for (std::size_t i = 0; i < pp.size(); ++i) {
      hits.clear();
      tree.query(bgi::intersects(bg::return_envelope<PlanarBox>(pp[i])),
                 std::back_inserter(hits));
      const double ai = bg::area(pp[i]);
      for (const auto& [bb, j] : hits) {
        PlanarMultiPolygon inter;
        bg::intersection(pp[i], gp[j], inter);
        const double ov = area_of(inter);
        if (!(ov > 0.0)) continue;
        const double uni = ai + bg::area(gp[j]) - ov;
        cand.push_back({i, j, pred[i].id, gt[j].id, ov,
                        uni > 0.0 ? std::clamp(ov / uni, 0.0, 1.0) : 0.0});
      }
    }
    std::sort(cand.begin(), cand.end(), [](const MatchPair& a, const MatchPair& b) {
      if (a.overlap_m2 != b.overlap_m2) return a.overlap_m2 > b.overlap_m2;
      return std::tie(a.pred_id, a.gt_id, a.pred, a.gt) <
             std::tie(b.pred_id, b.gt_id, b.pred, b.gt);
    });
    std::vector<bool> pred_used(pred.size(), false);
    std::vector<bool> gt_used(gt.size(), false);
    for (const MatchPair& c : cand) {
      if (pred_used[c.pred] || gt_used[c.gt]) continue;
      pred_used[c.pred] = true;
      gt_used[c.gt] = true;
      result.pairs.push_back(c);
    }
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (!pred_used[i]) result.unmatched_pred.push_back(pred[i].id);
    }
    for (std::size_t j = 0; j < gt.size(); ++j) {
      if (!gt_used[j]) result.unmatched_gt.push_back(gt[j].id);
    }
    return result;
  }
  for (const auto& r : pred) result.unmatched_pred.push_back(r.id);
  for (const auto& r : gt) result.unmatched_gt.push_back(r.id);
  return result;
}

double raster_iou(const RasterGrid& pred_mask, const std::vector<FootprintRecord>& gt,
                  double resolution_m) {
  require_semantic(pred_mask, Semantic::BinaryMask);
  if (!(resolution_m > 0.0)) throw ValidationError("resolution must be positive");
  const GridSpec& ps = pred_mask.spec();
  for (const auto& r : gt) {
    if (r.geometry.crs() != ps.crs) {
      throw CrsMismatch("mask and reference use different coordinate references");
    }
  }
  if (ps.crs != Crs::Geographic && ps.pixel_w == resolution_m &&
      ps.pixel_h == resolution_m) {
    const RasterGrid g = rasterize(gt, ps);
    return mask_iou(pred_mask.values(), g.values());
  }
  const LocalFrame f = LocalFrame::around(ps.crs, ps.bounds());
  const PlanarBox pb = f.project_box(ps.bounds());
  const Box b{pb.min_corner().x(), pb.min_corner().y(), pb.max_corner().x(),
              pb.max_corner().y()};
  const Crs planar = ps.crs == Crs::Geographic ? Crs::Planar : ps.crs;
  const GridSpec eval = grid_over(b, resolution_m, 1, planar);
  std::vector<double> pred(eval.size(), 0.0);
  for (int row = 0; row < eval.height; ++row) {
    for (int col = 0; col < eval.width; ++col) {
      if (auto c = ps.cell_of(f.to_native(eval.center({row, col})))) {
        pred[static_cast<std::size_t>(row) * eval.width + col] = pred_mask.at(c->row, c->col);
      }
    }
  }
  const auto gp = projected(gt, f);
  const RasterGrid g = rasterize(std::span<const GeoPolygon>(gp), eval);
  return mask_iou(pred, g.values());
}

std::optional<double> ap50(const std::vector<FootprintRecord>& pred,
                           const std::vector<FootprintRecord>& gt,
                           const MatchResult& match, ApProtocol protocol) {
  if (pred.empty()) return std::nullopt;
  std::vector<bool> tp(pred.size(), false);
  for (const MatchPair& p : match.pairs) {
    if (p.iou >= kTruePositiveIou) tp[p.pred] = true;
  }
  const auto tp_count = static_cast<double>(std::count(tp.begin(), tp.end(), true));
  if (protocol == ApProtocol::SinglePoint) {
    return tp_count / static_cast<double>(pred.size());
  }
  if (gt.empty()) return std::nullopt;
  std::vector<std::size_t> order(pred.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> area(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) area[i] = polygon_area_m2(pred[i].geometry);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (area[a] != area[b]) return area[a] > area[b];
    return pred[a].id < pred[b].id;
  });
  std::vector<double> precision;
  std::vector<double> recall;
  double hits = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (tp[order[k]]) hits += 1.0;
    precision.push_back(hits / static_cast<double>(k + 1));
    recall.push_back(hits / static_cast<double>(gt.size()));
  }
  // Monotone precision envelope, then area under the step curve.
  for (std::size_t k = precision.size() - 1; k > 0; --k) {
    precision[k - 1] = std::max(precision[k - 1], precision[k]);
  }
  double ap = 0.0;
  double prev_r = 0.0;
  for (std::size_t k = 0; k < precision.size(); ++k) {
    ap += (recall[k] - prev_r) * precision[k];
    prev_r = recall[k];
  }
  return ap;
}

std::optional<double> ar50(const std::vector<FootprintRecord>& gt,
                           const MatchResult& match) {
  if (gt.empty()) return std::nullopt;
  const auto tp = std::count_if(match.pairs.begin(), match.pairs.end(),
                                [](const MatchPair& p) { return p.iou >= kTruePositiveIou; });
  return static_cast<double>(tp) / static_cast<double>(gt.size());
}

std::optional<double> n_ratio(std::size_t pred_count, std::size_t gt_count) {
  if (gt_count == 0) return std::nullopt;
  return static_cast<double>(pred_count) / static_cast<double>(gt_count);
}

ErrorPair volume_error(const std::vector<FootprintRecord>& pred,
                       const std::vector<FootprintRecord>& gt,
                       const VolumeGridOptions& opts) {
  if (!(opts.pixel_m > 0.0) || !(opts.cell_m >= opts.pixel_m)) {
    throw ValidationError("volume grid needs 0 < pixel_m <= cell_m");
  }
  const double ratio = opts.cell_m / opts.pixel_m;
  const int ppc = static_cast<int>(std::lround(ratio));
  if (std::abs(ratio - ppc) > 1e-9) {
    throw ValidationError("cell_m must be an integer multiple of pixel_m");
  }
  std::optional<Crs> crs;
  const auto box = joint_bbox(pred, gt, crs);
  if (!box) return {};
  const LocalFrame f = LocalFrame::around(*crs, *box);
  const auto pp = projected(pred, f);
  const auto gp = projected(gt, f);
  const Crs planar = *crs == Crs::Geographic ? Crs::Planar : *crs;
  const GridSpec grid = grid_over(planar_bounds(pp, gp), opts.pixel_m, ppc, planar);
  const RasterGrid pr = burn_prisms(pred, pp, grid);
  const RasterGrid gr = burn_prisms(gt, gp, grid);

  const int cw = grid.width / ppc;
  const int ch = grid.height / ppc;
  std::vector<double> diff(static_cast<std::size_t>(cw) * ch, 0.0);
  const double px_area = opts.pixel_m * opts.pixel_m;
  for (int row = 0; row < grid.height; ++row) {
    for (int col = 0; col < grid.width; ++col) {
      const std::size_t i = pr.index(row, col);
      diff[static_cast<std::size_t>(row / ppc) * cw + col / ppc] +=
          (pr.values()[i] - gr.values()[i]) * px_area;
    }
  }
  // Normalise to m^3 per 100 m^2.
  const double scale = 100.0 / (opts.cell_m * opts.cell_m);
  double se = 0.0;
  double ae = 0.0;
  for (double d : diff) {
    se += (d * scale) * (d * scale);
    ae += std::abs(d * scale);
  }
  const auto n = static_cast<double>(diff.size());
  return {std::sqrt(se / n), ae / n};
}

ErrorPair volume_error(const RasterGrid& pred_height, const RasterGrid* built_fraction,
                       const std::vector<FootprintRecord>& gt) {
  require_semantic(pred_height, Semantic::HeightMeters);
  const GridSpec& g = pred_height.spec();
  if (built_fraction && !built_fraction->spec().same_geometry(g)) {
    throw GridMismatch("built fraction raster does not match the height grid");
  }
  for (const auto& r : gt) {
    if (r.geometry.crs() != g.crs) {
      throw CrsMismatch("height raster and reference use different coordinate references");
    }
  }
  const SpatialIndex index{std::span<const FootprintRecord>(gt)};
  const auto [pw_m, ph_m] = g.pixel_size_m();
  const int n = std::clamp(static_cast<int>(std::lround(std::max(pw_m, ph_m))), 1, 512);

  double se = 0.0;
  double ae = 0.0;
  for (int row = 0; row < g.height; ++row) {
    const double cell_area = g.pixel_area_m2(row);
    for (int col = 0; col < g.width; ++col) {
      double h = pred_height.at(row, col);
      h = pred_height.is_nodata(h) ? 0.0 : std::max(0.0, h);
      double bf = 1.0;
      if (built_fraction) {
        const double v = built_fraction->at(row, col);
        bf = built_fraction->is_nodata(v) ? 0.0 : v;
      }
      const double pred_vol = h * bf * cell_area;

      const double x0 = g.origin_x + col * g.pixel_w;
      const double y0 = g.origin_y - row * g.pixel_h;
      const auto hits = index.query({x0, y0 - g.pixel_h, x0 + g.pixel_w, y0});
      double gt_vol = 0.0;
      if (!hits.empty()) {
        double sum_h = 0.0;
        for (int sy = 0; sy < n; ++sy) {
          for (int sx = 0; sx < n; ++sx) {
            const Point p{x0 + (sx + 0.5) * g.pixel_w / n, y0 - (sy + 0.5) * g.pixel_h / n};
            double top = 0.0;
            for (std::size_t k : hits) {
              if (gt[k].geometry.contains(p)) top = std::max(top, gt[k].height_m.value_or(0.0));
            }
            sum_h += top;
          }
        }
        gt_vol = sum_h * cell_area / (static_cast<double>(n) * n);
      }
      const double e = (pred_vol - gt_vol) * 100.0 / cell_area;
      se += e * e;
      ae += std::abs(e);
    }
  }
  const auto cells = static_cast<double>(g.size());
  return {std::sqrt(se / cells), ae / cells};
}

std::optional<ErrorPair> height_error(const std::vector<FootprintRecord>& pred,
                                      const std::vector<FootprintRecord>& gt,
                                      const MatchResult& match) {
  double se = 0.0;
  double ae = 0.0;
  std::size_t n = 0;
  for (const MatchPair& p : match.pairs) {
    const auto& hp = pred[p.pred].height_m;
    const auto& hg = gt[p.gt].height_m;
    if (!hp || !hg) continue;
    const double d = *hp - *hg;
    se += d * d;
    ae += std::abs(d);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return ErrorPair{std::sqrt(se / static_cast<double>(n)), ae / static_cast<double>(n)};
}

std::optional<double> completeness(const std::vector<FootprintRecord>& pred,
                                   const std::vector<FootprintRecord>& gt,
                                   const MatchResult& match, double min_h) {
  if (gt.empty()) return std::nullopt;
  std::size_t valid = 0;
  for (const MatchPair& p : match.pairs) {
    const auto& h = pred[p.pred].height_m;
    if (h && *h >= min_h) ++valid;
  }
  return static_cast<double>(valid) / static_cast<double>(gt.size());
}

std::string EvalReport::csv_header() {
  return "city,product,iou,ap50,ar50,n_ratio,rmse_bv,mae_bv,rmse_bh,mae_bh,completeness";
}

std::string EvalReport::csv_row() const {
  auto f = [](const std::optional<double>& v) {
    return v ? fmt::format("{:.6f}", *v) : std::string();
  };
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{}", city, product, f(iou), f(ap50),
                     f(ar50), f(n_ratio), f(rmse_bv), f(mae_bv), f(rmse_bh), f(mae_bh),
                     f(completeness));
}

EvalReport evaluate(const std::vector<FootprintRecord>& pred,
                    const std::vector<FootprintRecord>& gt, const EvalOptions& opts) {
  EvalReport rep;
  std::optional<Crs> crs;
  const auto box = joint_bbox(pred, gt, crs);
  if (box) {
    const LocalFrame f = LocalFrame::around(*crs, *box);
    const auto pp = projected(pred, f);
    const auto gp = projected(gt, f);
    const Crs planar = *crs == Crs::Geographic ? Crs::Planar : *crs;
    const GridSpec grid = grid_over(planar_bounds(pp, gp), opts.iou_resolution_m, 1, planar);
    const RasterGrid pm = rasterize(std::span<const GeoPolygon>(pp), grid);
    const RasterGrid gm = rasterize(std::span<const GeoPolygon>(gp), grid);
    rep.iou = mask_iou(pm.values(), gm.values());
    const ErrorPair bv = volume_error(pred, gt, opts.volume);
    rep.rmse_bv = bv.rmse;
    rep.mae_bv = bv.mae;
  }
  const MatchResult m = match_max_overlap(pred, gt);
  rep.ap50 = ap50(pred, gt, m, opts.protocol);
  rep.ar50 = ar50(gt, m);
  rep.n_ratio = n_ratio(pred.size(), gt.size());
  if (auto he = height_error(pred, gt, m)) {
    rep.rmse_bh = he->rmse;
    rep.mae_bh = he->mae;
  }
  rep.completeness = completeness(pred, gt, m, opts.min_height_m);
  return rep;
}

std::vector<FootprintRecord> to_footprints(const std::vector<Lod1Record>& records) {
  std::vector<FootprintRecord> out;
  out.reserve(records.size());
  for (const Lod1Record& r : records) {
    FootprintRecord f = r.footprint;
    f.height_m = r.height_m;
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace gba
