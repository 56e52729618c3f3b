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
#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "gba/error.hpp"
#include "gba/metrics.hpp"
#include "gba/raster_ops.hpp"
#include "support.hpp"

using namespace gba;
using gba::test::rect_record;

namespace {

std::vector<GeoPolygon> geoms(const std::vector<FootprintRecord>& v) {
  std::vector<GeoPolygon> out;
  for (const auto& r : v) out.push_back(r.geometry);
  return out;
}

double count_iou(const std::vector<double>& a, const std::vector<double>& b) {
  double inter = 0;
  double uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += (a[i] == 1 && b[i] == 1);
    uni += (a[i] == 1 || b[i] == 1);
  }
  return uni == 0 ? 1.0 : inter / uni;
}

/// All-point interpolated AP: sum over recall steps of the best precision
/// at that recall or beyond.
double oracle_area_ap(const std::vector<FootprintRecord>& pred, std::size_t n_gt,
                      const std::vector<gba::test::OraclePair>& pairs) {
  std::vector<std::tuple<double, std::string, bool>> ranked;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    bool tp = false;
    for (const auto& p : pairs) tp = tp || (p.pred == i && p.iou >= 0.5);
    ranked.emplace_back(-gba::test::rect_of(pred[i].geometry).area(), pred[i].id, tp);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<double> prec;
  std::vector<double> rec;
  int hits = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    hits += std::get<2>(ranked[k]);
    prec.push_back(static_cast<double>(hits) / static_cast<double>(k + 1));
    rec.push_back(static_cast<double>(hits) / static_cast<double>(n_gt));
  }
  double ap = 0.0;
  for (std::size_t k = 0; k < rec.size(); ++k) {
    const double step = rec[k] - (k ? rec[k - 1] : 0.0);
    if (step == 0.0) continue;
    double best = 0.0;
    for (std::size_t j = k; j < rec.size(); ++j) best = std::max(best, prec[j]);
    ap += step * best;
  }
  return ap;
}

}  // namespace

TEST_CASE("raster IoU cases") {
  const GridSpec g{0, 9, 3, 3, 3, 3, Crs::Planar};
  const auto sq = rect_record("g", 0, 3, 6, 9);
  const RasterGrid same = rasterize(std::span<const FootprintRecord>(&sq, 1), g);
  CHECK(raster_iou(same, {sq}) == 1.0);
  CHECK(raster_iou(same, {rect_record("d", 6, 0, 9, 3)}) == 0.0);
  CHECK(raster_iou(same, {rect_record("h", 3, 3, 9, 9)}) == doctest::Approx(1.0 / 3.0));
  const RasterGrid empty(g, Semantic::BinaryMask, 0, 0.0);
  CHECK(raster_iou(empty, {}) == 1.0);
  CHECK(raster_iou(empty, {sq}) == 0.0);
  CHECK_THROWS_AS(raster_iou(same, {rect_record("x", 0, 0, 1, 1, {}, Crs::Geographic)}),
                  CrsMismatch);
  // A 1 m mask is resampled to the 3 m evaluation grid.
  const GridSpec fine{0, 9, 1, 1, 9, 9, Crs::Planar};
  const RasterGrid fm = rasterize(std::span<const FootprintRecord>(&sq, 1), fine);
  CHECK(raster_iou(fm, {sq}, 3.0) == 1.0);
}

TEST_CASE("raster IoU equals a pixel count on random towns") {
  const GridSpec g{0, 150, 3, 3, 50, 50, Crs::Planar};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto gt = gba::test::planar_town(seed, 60, 150);
    const auto pred = gba::test::perturb_town(gt, seed * 3, 150);
    const auto pv = gba::test::oracle_burn(geoms(pred), g);
    const RasterGrid mask(g, Semantic::BinaryMask, 0, pv);
    CHECK(raster_iou(mask, gt) == doctest::Approx(count_iou(pv, gba::test::oracle_burn(geoms(gt), g)))
                                      .epsilon(1e-12));
  }
}

TEST_CASE("matching equals the exhaustive greedy oracle") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto gt = gba::test::planar_town(seed, 80, 200);
    const auto pred = gba::test::perturb_town(gt, seed + 1000, 200);
    const MatchResult m = match_max_overlap(pred, gt);
    const auto o = gba::test::oracle_match(pred, gt);
    REQUIRE(m.pairs.size() == o.size());
    for (std::size_t k = 0; k < o.size(); ++k) {
      CHECK(m.pairs[k].pred == o[k].pred);
      CHECK(m.pairs[k].gt == o[k].gt);
      CHECK(m.pairs[k].pred_id == pred[o[k].pred].id);
      CHECK(m.pairs[k].overlap_m2 == doctest::Approx(o[k].overlap).epsilon(1e-9));
      CHECK(m.pairs[k].iou == doctest::Approx(o[k].iou).epsilon(1e-9));
    }
    CHECK(m.unmatched_pred.size() + m.pairs.size() == pred.size());
    CHECK(m.unmatched_gt.size() + m.pairs.size() == gt.size());
  }
  const auto gt = gba::test::planar_town(3, 20, 100);
  const MatchResult self = match_max_overlap(gt, gt);
  CHECK(self.pairs.size() == gt.size());
  for (const auto& p : self.pairs) {
    CHECK(p.pred == p.gt);
    CHECK(p.iou == doctest::Approx(1.0));
  }
  CHECK(match_max_overlap(gt, {rect_record("far", 500, 500, 510, 510)}).pairs.empty());
}

TEST_CASE("matching breaks equal overlaps by identifiers") {
  // Both predictions overlap the reference by the same area.
  const std::vector<FootprintRecord> gt = {rect_record("g", 0, 0, 10, 10)};
  const std::vector<FootprintRecord> pred = {rect_record("b", 5, 0, 15, 10),
                                             rect_record("a", -5, 0, 5, 10)};
  const MatchResult m = match_max_overlap(pred, gt);
  REQUIRE(m.pairs.size() == 1);
  CHECK(m.pairs[0].pred_id == "a");
  CHECK(m.unmatched_pred == std::vector<std::string>{"b"});
}

TEST_CASE("AP50 and AR50 on a hand-counted corpus") {
  const std::vector<FootprintRecord> gt = {
      rect_record("g1", 0, 0, 10, 10), rect_record("g2", 20, 0, 30, 10),
      rect_record("g3", 40, 0, 50, 10), rect_record("g4", 60, 0, 70, 10)};
  const std::vector<FootprintRecord> pred = {
      rect_record("p1", 0, 0, 10, 10), rect_record("p2", 21, 0, 31, 10),
      rect_record("p3", 40, 1, 50, 10),
      rect_record("p4", 67, 0, 77, 10),  // IoU 30/170
      rect_record("p5", 100, 0, 105, 5)};
  const MatchResult m = match_max_overlap(pred, gt);
  CHECK(*ap50(pred, gt, m) == doctest::Approx(0.6));
  CHECK(*ar50(gt, m) == doctest::Approx(0.75));
  CHECK(*n_ratio(pred.size(), gt.size()) == doctest::Approx(1.25));
  CHECK(*n_ratio(116, 100) == doctest::Approx(1.16));
  CHECK(*n_ratio(69, 100) == doctest::Approx(0.69));
  CHECK_FALSE(n_ratio(3, 0).has_value());
  CHECK_FALSE(ar50({}, m).has_value());
  CHECK_FALSE(ap50({}, gt, m).has_value());
  const MatchResult self = match_max_overlap(pred, pred);
  CHECK(*ap50(pred, pred, self) == 1.0);
  CHECK(*ar50(pred, self) == 1.0);
  // Shifting everything by 6 m leaves every IoU below 0.5.
  std::vector<FootprintRecord> shifted;
  for (const auto& r : gt) shifted.push_back(rect_record(r.id, 0, 0, 1, 1));
  for (std::size_t i = 0; i < gt.size(); ++i) shifted[i].geometry = gt[i].geometry.translated(6, 0);
  const MatchResult sm = match_max_overlap(shifted, gt);
  CHECK(*ap50(shifted, gt, sm) == 0.0);
  CHECK(*ar50(gt, sm) == 0.0);
}

TEST_CASE("area-ranked AP equals the interpolated oracle") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto gt = gba::test::planar_town(seed, 50, 160);
    const auto pred = gba::test::perturb_town(gt, seed + 77, 160);
    const MatchResult m = match_max_overlap(pred, gt);
    const double expect = oracle_area_ap(pred, gt.size(), gba::test::oracle_match(pred, gt));
    CHECK(*ap50(pred, gt, m, ApProtocol::AreaRanked) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("volume error") {
  // Fully built 20 x 20 m block with a +1 m bias.
  const std::vector<FootprintRecord> gt = {rect_record("g", 0, 0, 20, 20, 5.0)};
  const std::vector<FootprintRecord> up = {rect_record("p", 0, 0, 20, 20, 6.0)};
  const ErrorPair e = volume_error(up, gt);
  CHECK(e.mae == doctest::Approx(100.0));
  CHECK(e.rmse == doctest::Approx(100.0));
  const ErrorPair z = volume_error(gt, gt);
  CHECK(z.rmse == 0.0);
  CHECK(z.mae == 0.0);
  CHECK_THROWS_AS(volume_error(gt, gt, {1.0, 2.5}), ValidationError);

  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const auto town = gba::test::planar_town(seed, 60, 150);
    const auto pred = gba::test::perturb_town(town, seed + 5, 150);
    const auto [rmse, mae] = gba::test::oracle_volume_error(pred, town);
    const ErrorPair got = volume_error(pred, town);
    CHECK(got.rmse == doctest::Approx(rmse).epsilon(1e-9));
    CHECK(got.mae == doctest::Approx(mae).epsilon(1e-9));
    // Translation invariance.
    std::vector<FootprintRecord> tp = pred;
    std::vector<FootprintRecord> tg = town;
    for (auto& r : tp) r.geometry = r.geometry.translated(1000, -3000);
    for (auto& r : tg) r.geometry = r.geometry.translated(1000, -3000);
    const ErrorPair moved = volume_error(tp, tg);
    CHECK(moved.rmse == doctest::Approx(got.rmse).epsilon(1e-12));
    CHECK(moved.mae == doctest::Approx(got.mae).epsilon(1e-12));
  }
}

TEST_CASE("raster volume error") {
  const std::vector<FootprintRecord> gt = {rect_record("g", 0, 0, 20, 10, 5.0)};
  const GridSpec g{0, 10, 10, 10, 2, 1, Crs::Planar};
  const RasterGrid h(g, Semantic::HeightMeters, -1, 5.0);
  const ErrorPair z = volume_error(h, nullptr, gt);
  CHECK(z.rmse == doctest::Approx(0.0).epsilon(1e-9));
  // Half-built cells at the same height overshoot by 250 m^3 per 100 m^2.
  const std::vector<FootprintRecord> half = {rect_record("g", 0, 0, 20, 5, 5.0)};
  CHECK(volume_error(h, nullptr, half).mae == doctest::Approx(250.0));
  const RasterGrid frac(g, Semantic::Probability, -1, 0.5);
  CHECK(volume_error(h, &frac, half).mae == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("height error and completeness") {
  const std::vector<FootprintRecord> gt = {
      rect_record("g1", 0, 0, 10, 10, 10.0), rect_record("g2", 20, 0, 30, 10, 10.0),
      rect_record("g3", 40, 0, 50, 10, 10.0), rect_record("g4", 60, 0, 70, 10, 10.0)};
  std::vector<FootprintRecord> pred = {
      rect_record("p1", 0, 0, 10, 10, 13.0), rect_record("p2", 20, 0, 30, 10, 6.0),
      rect_record("p3", 40, 0, 50, 10), rect_record("p4", 60, 0, 70, 10, 0.5)};
  pred[3].height_m.reset();
  const MatchResult m = match_max_overlap(pred, gt);
  const auto he = height_error(pred, gt, m);
  REQUIRE(he.has_value());
  CHECK(he->rmse == doctest::Approx(std::sqrt(12.5)));
  CHECK(he->rmse == doctest::Approx(3.536).epsilon(1e-3));
  CHECK(he->mae == doctest::Approx(3.5));
  CHECK(*completeness(pred, gt, m) == doctest::Approx(0.5));
  pred[2].height_m = 0.5;
  pred[3].height_m = 0.99;
  CHECK(*completeness(pred, gt, match_max_overlap(pred, gt)) == doctest::Approx(0.5));
  pred[3].height_m = 1.0;
  CHECK(*completeness(pred, gt, match_max_overlap(pred, gt)) == doctest::Approx(0.75));
  CHECK(*completeness(gt, gt, match_max_overlap(gt, gt)) == 1.0);
  CHECK(*completeness({}, gt, MatchResult{}) == 0.0);
  CHECK_FALSE(completeness(pred, {}, MatchResult{}).has_value());
  std::vector<FootprintRecord> bare = gt;
  for (auto& r : bare) r.height_m.reset();
  CHECK_FALSE(height_error(bare, gt, match_max_overlap(bare, gt)).has_value());
}

TEST_CASE("height error and completeness equal direct formulas on random towns") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto gt = gba::test::planar_town(seed, 70, 180);
    const auto pred = gba::test::perturb_town(gt, seed + 9, 180);
    const auto pairs = gba::test::oracle_match(pred, gt);
    double se = 0;
    double ae = 0;
    int n = 0;
    int valid = 0;
    for (const auto& p : pairs) {
      const auto& hp = pred[p.pred].height_m;
      if (hp && *hp >= 1.0) ++valid;
      if (!hp) continue;
      const double d = *hp - *gt[p.gt].height_m;
      se += d * d;
      ae += std::abs(d);
      ++n;
    }
    const MatchResult m = match_max_overlap(pred, gt);
    const auto he = height_error(pred, gt, m);
    REQUIRE(he.has_value());
    CHECK(he->rmse == doctest::Approx(std::sqrt(se / n)).epsilon(1e-12));
    CHECK(he->mae == doctest::Approx(ae / n).epsilon(1e-12));
    CHECK(*completeness(pred, gt, m) ==
          doctest::Approx(static_cast<double>(valid) / static_cast<double>(gt.size())));
  }
}

TEST_CASE("evaluation is permutation-invariant and in range") {
  std::mt19937_64 rng(44);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto gt = gba::test::planar_town(seed, 50, 150);
    const auto pred = gba::test::perturb_town(gt, seed + 21, 150);
    const EvalReport a = evaluate(pred, gt);
    auto sp = pred;
    auto sg = gt;
    std::shuffle(sp.begin(), sp.end(), rng);
    std::shuffle(sg.begin(), sg.end(), rng);
    const EvalReport b = evaluate(sp, sg);
    CHECK(a.csv_row() == b.csv_row());
    for (const auto& v : {a.iou, a.ap50, a.ar50, a.completeness}) {
      REQUIRE(v.has_value());
      CHECK(*v >= 0.0);
      CHECK(*v <= 1.0);
    }
    CHECK(*a.rmse_bv >= *a.mae_bv);
    CHECK(*a.rmse_bh >= *a.mae_bh);
  }
}

TEST_CASE("self-evaluation and report formatting") {
  const auto gt = gba::test::planar_town(8, 40, 120);
  EvalReport r = evaluate(gt, gt);
  CHECK(r.iou == 1.0);
  CHECK(r.ap50 == 1.0);
  CHECK(r.ar50 == 1.0);
  CHECK(r.n_ratio == 1.0);
  CHECK(r.rmse_bv == 0.0);
  CHECK(r.rmse_bh == 0.0);
  CHECK(r.completeness == 1.0);
  r.city = "munich";
  r.product = "GBA.LoD1";
  r.mae_bh.reset();
  CHECK(EvalReport::csv_header() ==
        "city,product,iou,ap50,ar50,n_ratio,rmse_bv,mae_bv,rmse_bh,mae_bh,completeness");
  CHECK(r.csv_row() ==
        "munich,GBA.LoD1,1.000000,1.000000,1.000000,1.000000,0.000000,0.000000,0.000000,,"
        "1.000000");
  const EvalReport none = evaluate({}, {});
  CHECK_FALSE(none.iou.has_value());
  CHECK_FALSE(none.ar50.has_value());
}
