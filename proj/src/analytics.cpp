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
#include "gba/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gba/error.hpp"
#include "gba/planar.hpp"

namespace gba {

void RegionStats::validate() const {
  if (total_area_m2 < 0.0 || total_volume_m3 < 0.0) {
    throw ValidationError("region " + region_id + " has negative totals");
  }
  if (population && *population < 0.0) {
    throw ValidationError("region " + region_id + " has negative population");
  }
}

std::vector<RegionStats> aggregate_by_region(const std::vector<Lod1Record>& records) {
  std::map<std::string, RegionStats> acc;
  for (const Lod1Record& r : records) {
    const std::string id = r.footprint.admin_id.value_or("");
    RegionStats& s = acc[id];
    s.region_id = id;
    ++s.building_count;
    s.total_area_m2 += polygon_area_m2(r.footprint.geometry);
    s.total_volume_m3 += r.volume_m3.value_or(0.0);
  }
  std::vector<RegionStats> out;
  out.reserve(acc.size());
  for (auto& [id, s] : acc) out.push_back(std::move(s));
  return out;
}

VolumeGrid grid_volume(const std::vector<Lod1Record>& records, double cell_m,
                       std::optional<Box> extent) {
  if (!(cell_m > 0.0)) throw ValidationError("cell size must be positive");
  Crs grid_crs = Crs::Planar;
  std::vector<Point> anchors;
  anchors.reserve(records.size());
  for (const Lod1Record& r : records) {
    const GeoPolygon& g = r.footprint.geometry;
    Crs c = g.crs() == Crs::Geographic ? Crs::EqualAreaCylindrical : g.crs();
    if (!anchors.empty() && c != grid_crs) {
      throw CrsMismatch("records use different coordinate references");
    }
    grid_crs = c;
    const Point p = g.centroid();
    anchors.push_back(g.crs() == Crs::Geographic ? cea_forward(p) : p);
  }

  Box b{};
  if (extent) {
    b = *extent;
  } else if (!anchors.empty()) {
    b = {anchors[0].x, anchors[0].y, anchors[0].x, anchors[0].y};
    for (const Point& p : anchors) b.expand(p);
  }
  const double x0 = std::floor(b.min_x / cell_m) * cell_m;
  const double y1 = std::floor(b.max_y / cell_m) * cell_m + cell_m;
  const int w = std::max(1, static_cast<int>(std::floor(b.max_x / cell_m) -
                                             std::floor(b.min_x / cell_m)) + 1);
  const int h = std::max(1, static_cast<int>(std::floor(b.max_y / cell_m) -
                                             std::floor(b.min_y / cell_m)) + 1);
  const GridSpec spec{x0, y1, cell_m, cell_m, w, h, grid_crs};
  std::vector<double> v(spec.size(), 0.0);
  std::size_t outside = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto col = static_cast<long long>(std::floor((anchors[i].x - x0) / cell_m));
    const auto row = static_cast<long long>(std::floor((y1 - anchors[i].y) / cell_m));
    if (col < 0 || row < 0 || col >= w || row >= h) {
      ++outside;
      continue;
    }
    v[static_cast<std::size_t>(row) * w + col] += records[i].volume_m3.value_or(0.0);
  }
  return {RasterGrid(spec, Semantic::VolumeM3, -1.0, std::move(v)), outside};
}

namespace {

void check_counts(const std::map<Continent, double>& counts,
                  const std::map<Continent, double>& ratios) {
  if (counts.empty()) throw MissingInput("no continental counts given");
  for (const auto& [c, n] : counts) {
    if (!(n >= 0.0)) {
      throw ValidationError("negative count for " + std::string(to_string(c)));
    }
  }
  for (const auto& [c, r] : ratios) {
    if (!(r > 0.0)) {
      throw ValidationError("non-positive N-ratio for " + std::string(to_string(c)));
    }
    if (!counts.contains(c)) {
      throw MissingInput("N-ratio given without a count for " + std::string(to_string(c)));
    }
  }
}

}  // namespace

double extrapolate_count(const std::map<Continent, double>& counts,
                         const std::map<Continent, double>& ratios, RatioPolicy policy,
                         double global_average) {
  check_counts(counts, ratios);
  double fallback = global_average;
  if (policy != RatioPolicy::GlobalAverage) {
    if (ratios.empty()) throw MissingInput("no N-ratios given");
    auto cmp = [](const auto& a, const auto& b) { return a.second < b.second; };
    fallback = policy == RatioPolicy::MaxRatio
                   ? std::max_element(ratios.begin(), ratios.end(), cmp)->second
                   : std::min_element(ratios.begin(), ratios.end(), cmp)->second;
  }
  if (!(fallback > 0.0)) throw ValidationError("fallback N-ratio must be positive");
  double total = 0.0;
  for (const auto& [c, n] : counts) {
    const auto it = ratios.find(c);
    total += n / (it == ratios.end() ? fallback : it->second);
  }
  return total;
}

CountEstimate estimate_global_count(const std::map<Continent, double>& counts,
                                    const std::map<Continent, double>& ratios,
                                    double global_average) {
  if (ratios.empty()) throw MissingInput("no N-ratios given");
  return {extrapolate_count(counts, ratios, RatioPolicy::GlobalAverage, global_average),
          extrapolate_count(counts, ratios, RatioPolicy::MaxRatio, global_average),
          extrapolate_count(counts, ratios, RatioPolicy::MinRatio, global_average)};
}

std::vector<double> mean_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("series lengths differ");
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("series lengths differ");
  const auto rx = mean_ranks(x);
  const auto ry = mean_ranks(y);
  return pearson(rx, ry);
}

std::optional<RegressionResult> loglog_regression(std::span<const double> x,
                                                  std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("series lengths differ");
  RegressionResult res;
  std::vector<double> fx;
  std::vector<double> fy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0) || !(y[i] >= 0.0)) {
      throw ValidationError("log regression needs non-negative values");
    }
    if (x[i] == 0.0 || y[i] == 0.0) {
      ++res.excluded;
      continue;
    }
    fx.push_back(x[i]);
    fy.push_back(y[i]);
  }
  res.n = fx.size();
  if (res.n < 2) return std::nullopt;
  std::vector<double> lx(res.n);
  std::vector<double> ly(res.n);
  std::transform(fx.begin(), fx.end(), lx.begin(), [](double v) { return std::log(v); });
  std::transform(fy.begin(), fy.end(), ly.begin(), [](double v) { return std::log(v); });
  const auto n = static_cast<double>(res.n);
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < res.n; ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const auto r = pearson(lx, ly);
  const auto rho = spearman(fx, fy);
  if (!(sxx > 0.0) || !r || !rho) return std::nullopt;
  res.slope = sxy / sxx;
  res.intercept = my - res.slope * mx;
  res.pearson_r = *r;
  res.spearman_rho = *rho;
  return res;
}

PerCapitaTable per_capita_indicators(const std::vector<RegionStats>& stats) {
  PerCapitaTable t;
  for (const RegionStats& s : stats) {
    s.validate();
    if (!s.population || !(*s.population > 0.0)) {
      t.excluded.push_back(s.region_id);
      continue;
    }
    t.rows.push_back({s.region_id, s.total_volume_m3 / *s.population,
                      s.total_area_m2 / *s.population});
  }
  return t;
}

namespace {

int sign_of(double d) { return (d > 0.0) - (d < 0.0); }

// Strictly ordered the same way by both series.
bool concordant(std::span<const double> s, std::span<const double> ref, std::size_t i,
                std::size_t j) {
  const int a = sign_of(s[i] - s[j]);
  const int b = sign_of(ref[i] - ref[j]);
  return a != 0 && a == b;
}

void check_series(std::size_t n, std::size_t m) {
  if (n != m) throw ValidationError("series lengths differ");
  if (n < 2) throw ValidationError("ranking needs at least two regions");
}

}  // namespace

RankingAgreement ranking_agreement(std::span<const double> indicator,
                                   std::span<const double> reference) {
  check_series(indicator.size(), reference.size());
  RankingAgreement out;
  for (std::size_t i = 0; i < indicator.size(); ++i) {
    for (std::size_t j = i + 1; j < indicator.size(); ++j) {
      ++out.pairs;
      out.agreements += concordant(indicator, reference, i, j) ? 1 : 0;
    }
  }
  return out;
}

double AgreementDecomposition::rate_a() const {
  return pairs == 0 ? 0.0 : static_cast<double>(total_a()) / static_cast<double>(pairs);
}

double AgreementDecomposition::rate_b() const {
  return pairs == 0 ? 0.0 : static_cast<double>(total_b()) / static_cast<double>(pairs);
}

AgreementDecomposition agreement_decomposition(std::span<const double> a,
                                               std::span<const double> b,
                                               std::span<const double> reference) {
  check_series(a.size(), reference.size());
  check_series(b.size(), reference.size());
  AgreementDecomposition d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      ++d.pairs;
      const bool ca = concordant(a, reference, i, j);
      const bool cb = concordant(b, reference, i, j);
      if (ca && cb) {
        ++d.both;
      } else if (ca) {
        ++d.only_a;
      } else if (cb) {
        ++d.only_b;
      } else {
        ++d.neither;
      }
    }
  }
  return d;
}

}  // namespace gba
