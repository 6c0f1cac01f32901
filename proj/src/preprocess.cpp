// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#include "satrecon/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "satrecon/error.hpp"

namespace satrecon::preprocess {

void SceneMetadata::validate() const {
  if (!(cloud_cover >= 0.0 && cloud_cover <= 1.0)) {
    throw InvalidArgument("cloud_cover of scene '" + id + "' must be in [0, 1]");
  }
}

std::vector<SceneMetadata> filter_by_cloud_cover(const std::vector<SceneMetadata>& scenes,
                                                 double threshold) {
  std::vector<SceneMetadata> kept;
  std::copy_if(scenes.begin(), scenes.end(), std::back_inserter(kept),
               [threshold](const SceneMetadata& s) { return s.cloud_cover <= threshold; });
  return kept;
}

void AoiBox::validate() const {
  if (!(e_min <= e_max) || !(n_min <= n_max)) {
    throw InvalidArgument("AOI minimum must not exceed maximum");
  }
  if (zone < 1 || zone > 60) throw InvalidArgument("AOI zone must be in [1, 60]");
}

PixelBox aoi_to_pixel_bbox(const camera::RpcCamera& rpc, const AoiBox& aoi, double height_m,
                           int image_width, int image_height) {
  aoi.validate();
  rpc.validate();

  double smin = std::numeric_limits<double>::infinity(), smax = -smin;
  double lmin = smin, lmax = -smin;
  const double es[2] = {aoi.e_min, aoi.e_max};
  const double ns[2] = {aoi.n_min, aoi.n_max};
  for (double e : es) {
    for (double n : ns) {
      const auto geo = utm::utm_to_geodetic(e, n, aoi.zone, aoi.hemisphere);
      const auto px = camera::rpc_project(rpc, geo.lat, geo.lon, height_m);
      smin = std::min(smin, px.sample);
      smax = std::max(smax, px.sample);
      lmin = std::min(lmin, px.line);
      lmax = std::max(lmax, px.line);
    }
  }

  const double x0 = std::floor(smin);
  const double y0 = std::floor(lmin);
  const double x1 = std::max(std::ceil(smax), x0 + 1.0);
  const double y1 = std::max(std::ceil(lmax), y0 + 1.0);

  const double cx0 = std::max(x0, 0.0);
  const double cy0 = std::max(y0, 0.0);
  const double cx1 = std::min(x1, static_cast<double>(image_width));
  const double cy1 = std::min(y1, static_cast<double>(image_height));
  if (!(cx1 > cx0) || !(cy1 > cy0)) {
    throw EmptyResult("AOI does not intersect the image");
  }
  return PixelBox{static_cast<int>(cx0), static_cast<int>(cy0), static_cast<int>(cx1 - cx0),
                  static_cast<int>(cy1 - cy0)};
}

float nearest_rank_percentile(std::vector<float>& values, double percent) {
  if (values.empty()) throw InvalidArgument("percentile of an empty sample");
  const double pos = percent / 100.0 * static_cast<double>(values.size() - 1);
  auto idx = static_cast<std::size_t>(std::floor(pos + 0.5));
  idx = std::min(idx, values.size() - 1);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx), values.end());
  return values[idx];
}

namespace {

struct ChannelRange {
  float lo;
  float hi;
};

std::vector<ChannelRange> channel_percentiles(const Raster& raster, double lo, double hi) {
  if (!(lo < hi) || lo < 0.0 || hi > 100.0) {
    throw InvalidArgument("percentiles must satisfy 0 <= lo < hi <= 100");
  }
  std::vector<ChannelRange> ranges;
  std::vector<float> valid;
  valid.reserve(static_cast<std::size_t>(raster.width()) * raster.height());
  for (int c = 0; c < raster.channels(); ++c) {
    valid.clear();
    for (int y = 0; y < raster.height(); ++y)
      for (int x = 0; x < raster.width(); ++x) {
        const float v = raster.at(x, y, c);
        if (!raster.is_nodata(v)) valid.push_back(v);
      }
    if (valid.empty()) {
      throw InvalidArgument("channel " + std::to_string(c) + " has no valid samples");
    }
    const float plo = nearest_rank_percentile(valid, lo);
    const float phi = nearest_rank_percentile(valid, hi);
    ranges.push_back({plo, phi});
  }
  return ranges;
}

}  // namespace

Raster percentile_clip(const Raster& raster, double lo, double hi) {
  const auto ranges = channel_percentiles(raster, lo, hi);
  Raster out = raster;
  auto s = out.samples();
  const int nc = raster.channels();
  const auto n = static_cast<std::ptrdiff_t>(s.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const float v = s[i];
    if (out.is_nodata(v)) continue;
    const auto& r = ranges[static_cast<std::size_t>(i % nc)];
    s[i] = std::clamp(v, r.lo, r.hi);
  }
  return out;
}

float tonemap_normalized(double v) {
  const double g = std::pow(std::clamp(v, 0.0, 1.0), 1.0 / 2.2);
  return static_cast<float>(std::floor(255.0 * g + 0.5));
}

Raster tonemap(const Raster& raster, double lo, double hi) {
  const Raster clipped = percentile_clip(raster, lo, hi);
  const auto ranges = channel_percentiles(clipped, 0.0, 100.0);
  Raster out = clipped;
  auto s = out.samples();
  const int nc = raster.channels();
  const auto n = static_cast<std::ptrdiff_t>(s.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const float v = s[i];
    if (out.is_nodata(v)) continue;
    const auto& r = ranges[static_cast<std::size_t>(i % nc)];
    const double span = static_cast<double>(r.hi) - r.lo;
    const double norm = span > 0.0 ? (static_cast<double>(v) - r.lo) / span : 0.0;
    s[i] = tonemap_normalized(norm);
  }
  return out;
}

Raster pansharpen_brovey(const Raster& pan, const Raster& msi, const std::array<double, 3>& weights) {
  if (pan.channels() != 1) throw InvalidArgument("pan image must have one channel");
  if (msi.channels() != 3) throw InvalidArgument("multispectral image must have three channels");
  if (pan.width() <= 0 || pan.height() <= 0 || msi.width() <= 0 || msi.height() <= 0) {
    throw InvalidArgument("pan/msi dimension ratio must be positive");
  }
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("Brovey weights must be non-negative");
    wsum += w;
  }
  if (!(wsum > 0.0)) throw InvalidArgument("Brovey weights must not all be zero");
  const std::array<double, 3> wn{weights[0] / wsum, weights[1] / wsum, weights[2] / wsum};

  const double rx = static_cast<double>(msi.width()) / pan.width();
  const double ry = static_cast<double>(msi.height()) / pan.height();
  const bool same_grid = msi.width() == pan.width() && msi.height() == pan.height();

  Raster out(pan.width(), pan.height(), 3, kNoData, kNoData);
  const int w = pan.width();
  const int h = pan.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float p = pan.at(x, y);
      if (pan.is_nodata(p)) continue;
      double m[3];
      bool ok = true;
      for (int c = 0; c < 3 && ok; ++c) {
        const float v = same_grid ? msi.at(x, y, c)
                                  : cubic_interpolate(msi, (x + 0.5) * rx - 0.5, (y + 0.5) * ry - 0.5, c);
        ok = !msi.is_nodata(v);
        m[c] = v;
      }
      if (!ok) continue;
      const double denom = wn[0] * m[0] + wn[1] * m[1] + wn[2] * m[2];
      if (!(std::abs(denom) >= 1e-6)) continue;
      const double ratio = p / denom;
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = static_cast<float>(m[c] * ratio);
    }
  }
  return out;
}

}  // namespace satrecon::preprocess
