// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "satrecon/error.hpp"
#include "satrecon/preprocess.hpp"
#include "satrecon/reference.hpp"
#include "satrecon/utm.hpp"

using namespace satrecon;
using namespace satrecon::preprocess;

namespace {

// sample = 5000 + 100000 * (lon - cm), line = 5000 - 100000 * (lat - lat0)
camera::RpcCamera linear_rpc(double lat0, double lon0) {
  camera::RpcCamera rpc;
  rpc.samp_num[1] = 1.0;
  rpc.line_num[2] = -1.0;
  rpc.samp_den[0] = rpc.line_den[0] = 1.0;
  rpc.lat_off = lat0;
  rpc.lon_off = lon0;
  rpc.lat_scale = rpc.lon_scale = 0.1;
  rpc.height_scale = 500;
  rpc.samp_off = rpc.line_off = 5000;
  rpc.samp_scale = rpc.line_scale = 10000;
  return rpc;
}

Raster ramp_raster() {
  Raster r(1000, 1, 1, 0.0f);
  for (int x = 0; x < 1000; ++x) r.at(x, 0) = static_cast<float>(x);
  return r;
}

}  // namespace

TEST(CloudFilter, ThresholdIsInclusive) {
  std::vector<SceneMetadata> scenes{{"a", 0.6, "", SensorKind::Panchromatic},
                                    {"b", 0.5, "", SensorKind::Panchromatic},
                                    {"c", 0.1, "", SensorKind::Multispectral}};
  const auto kept = filter_by_cloud_cover(scenes);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].id, "b");
  EXPECT_EQ(kept[1].id, "c");
  EXPECT_TRUE(filter_by_cloud_cover({}).empty());
}

TEST(AoiBbox, LinearRpcMatchesMappedRectangle) {
  const int zone = 33;
  const auto center = utm::geodetic_to_utm(45.0, utm::central_meridian(zone), zone, utm::Hemisphere::North);
  const auto rpc = linear_rpc(45.0, utm::central_meridian(zone));
  const AoiBox aoi{center.easting - 300, center.northing - 200, center.easting + 300, center.northing + 200, zone,
                   utm::Hemisphere::North};
  double smin = 1e300, smax = -1e300, lmin = 1e300, lmax = -1e300;
  for (double e : {aoi.e_min, aoi.e_max}) {
    for (double n : {aoi.n_min, aoi.n_max}) {
      const auto g = utm::utm_to_geodetic(e, n, zone, utm::Hemisphere::North);
      const double s = 5000 + 100000 * (g.lon - rpc.lon_off);
      const double l = 5000 - 100000 * (g.lat - rpc.lat_off);
      smin = std::min(smin, s);
      smax = std::max(smax, s);
      lmin = std::min(lmin, l);
      lmax = std::max(lmax, l);
    }
  }
  const auto box = aoi_to_pixel_bbox(rpc, aoi, 0.0, 10000, 10000);
  EXPECT_EQ(box.x, static_cast<int>(std::floor(smin)));
  EXPECT_EQ(box.y, static_cast<int>(std::floor(lmin)));
  EXPECT_EQ(box.x + box.width, static_cast<int>(std::ceil(smax)));
  EXPECT_EQ(box.y + box.height, static_cast<int>(std::ceil(lmax)));
}

TEST(AoiBbox, DegeneratePointGivesOnePixel) {
  const int zone = 33;
  const auto rpc = linear_rpc(45.0, utm::central_meridian(zone));
  const auto c = utm::geodetic_to_utm(45.0001, utm::central_meridian(zone) + 0.0001, zone, utm::Hemisphere::North);
  const AoiBox aoi{c.easting, c.northing, c.easting, c.northing, zone, utm::Hemisphere::North};
  const auto box = aoi_to_pixel_bbox(rpc, aoi, 0.0, 10000, 10000);
  EXPECT_EQ(box.width, 1);
  EXPECT_EQ(box.height, 1);
}

TEST(AoiBbox, OutsideImageIsEmpty) {
  const int zone = 33;
  const auto rpc = linear_rpc(45.0, utm::central_meridian(zone));
  const auto c = utm::geodetic_to_utm(46.0, utm::central_meridian(zone), zone, utm::Hemisphere::North);
  const AoiBox aoi{c.easting, c.northing, c.easting + 100, c.northing + 100, zone, utm::Hemisphere::North};
  EXPECT_THROW(aoi_to_pixel_bbox(rpc, aoi, 0.0, 10000, 10000), EmptyResult);
  const AoiBox inverted{10, 10, 5, 20, zone, utm::Hemisphere::North};
  EXPECT_THROW(aoi_to_pixel_bbox(rpc, inverted, 0.0, 10000, 10000), InvalidArgument);
}

TEST(PercentileClip, ConstantRasterUnchanged) {
  const Raster r(5, 5, 1, 3.0f);
  const Raster out = percentile_clip(r);
  EXPECT_TRUE(std::equal(r.samples().begin(), r.samples().end(), out.samples().begin()));
}

TEST(PercentileClip, RampClampsToIndexBounds) {
  const Raster out = percentile_clip(ramp_raster(), 0.5, 99.5);
  const auto [mn, mx] = std::minmax_element(out.samples().begin(), out.samples().end());
  EXPECT_EQ(*mn, 5.0f);
  EXPECT_EQ(*mx, 994.0f);
  // Sort-based oracle: index floor(p/100 * (N - 1) + 0.5) into the sorted values.
  std::vector<float> v(1000);
  for (int i = 0; i < 1000; ++i) v[i] = static_cast<float>(999 - i);
  std::sort(v.begin(), v.end());
  EXPECT_EQ(v[static_cast<std::size_t>(std::floor(0.005 * 999 + 0.5))], 5.0f);
  EXPECT_EQ(v[static_cast<std::size_t>(std::floor(0.995 * 999 + 0.5))], 994.0f);
}

TEST(PercentileClip, ChannelsAreIndependent) {
  Raster r(10, 10, 2, 0.0f);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) {
      r.at(x, y, 0) = static_cast<float>(x % 2);
      r.at(x, y, 1) = static_cast<float>(x);
    }
  }
  r.at(9, 9, 1) = 1e6f;
  r.at(0, 0, 1) = -1e6f;
  const Raster out = percentile_clip(r, 2, 98);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 10; ++x) EXPECT_EQ(out.at(x, y, 0), r.at(x, y, 0));
  }
  EXPECT_LT(out.at(9, 9, 1), 1e6f);
  EXPECT_GT(out.at(0, 0, 1), -1e6f);
}

TEST(PercentileClip, NodataIgnoredAndPreserved) {
  Raster r = ramp_raster();
  r.at(500, 0) = kNoData;
  const Raster out = percentile_clip(r);
  EXPECT_TRUE(std::isnan(out.at(500, 0)));
  EXPECT_THROW(percentile_clip(Raster(3, 3, 1)), InvalidArgument);
  EXPECT_THROW(percentile_clip(ramp_raster(), 60, 40), InvalidArgument);
}

TEST(Tonemap, Anchors) {
  EXPECT_EQ(tonemap_normalized(1.0), 255.0f);
  EXPECT_EQ(tonemap_normalized(0.0), 0.0f);
  EXPECT_EQ(tonemap_normalized(0.5), 186.0f);
  EXPECT_EQ(std::floor(255.0 * std::pow(0.5, 1.0 / 2.2) + 0.5), 186.0);
}

TEST(Tonemap, RangeAndMonotonicity) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<float> v(0.0f, 4096.0f);
  Raster r(64, 1, 1, 0.0f);
  for (auto& s : r.samples()) s = v(rng);
  const Raster out = tonemap(r);
  for (int i = 0; i < 64; ++i) {
    for (int j = 0; j < 64; ++j) {
      if (r.at(i, 0) <= r.at(j, 0)) EXPECT_LE(out.at(i, 0), out.at(j, 0));
    }
    EXPECT_GE(out.at(i, 0), 0.0f);
    EXPECT_LE(out.at(i, 0), 255.0f);
    EXPECT_EQ(out.at(i, 0), std::round(out.at(i, 0)));
  }
}

TEST(Tonemap, ConstantChannelMapsToZero) {
  const Raster out = tonemap(Raster(4, 4, 1, 12.0f));
  for (float s : out.samples()) EXPECT_EQ(s, 0.0f);
}

TEST(Brovey, EqualChannelsReproducePan) {
  Raster pan(4, 4, 1, 0.0f), msi(2, 2, 3, 0.0f);
  for (int i = 0; i < 16; ++i) pan.samples()[i] = static_cast<float>(i + 1);
  for (auto& s : msi.samples()) s = 3.0f;
  const Raster out = pansharpen_brovey(pan, msi);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      for (int c = 0; c < 3; ++c) EXPECT_NEAR(out.at(x, y, c), pan.at(x, y), 1e-6);
    }
  }
}

TEST(Brovey, HandEvaluated) {
  const Raster pan(1, 1, 1, 8.0f), msi(1, 1, 3, {2.0f, 4.0f, 6.0f});
  const Raster out = pansharpen_brovey(pan, msi);
  EXPECT_NEAR(out.at(0, 0, 0), 4.0f, 1e-6);
  EXPECT_NEAR(out.at(0, 0, 1), 8.0f, 1e-6);
  EXPECT_NEAR(out.at(0, 0, 2), 12.0f, 1e-6);
}

TEST(Brovey, ZeroDenominatorIsNodata) {
  const Raster pan(1, 1, 1, 8.0f), msi(1, 1, 3, 0.0f);
  const Raster out = pansharpen_brovey(pan, msi);
  for (int c = 0; c < 3; ++c) EXPECT_TRUE(std::isnan(out.at(0, 0, c)));
}

TEST(Brovey, RejectsBadInputs) {
  const Raster pan(2, 2, 1, 1.0f), msi(1, 1, 3, 1.0f);
  EXPECT_THROW(pansharpen_brovey(msi, msi), InvalidArgument);
  EXPECT_THROW(pansharpen_brovey(pan, pan), InvalidArgument);
  EXPECT_THROW(pansharpen_brovey(pan, msi, {0, 0, 0}), InvalidArgument);
  EXPECT_THROW(pansharpen_brovey(pan, msi, {1, -1, 1}), InvalidArgument);
}

TEST(Brovey, MatchesReference) {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<float> v(1.0f, 100.0f);
  Raster pan(16, 12, 1, 0.0f), msi(4, 3, 3, 0.0f);
  for (auto& s : pan.samples()) s = v(rng);
  for (auto& s : msi.samples()) s = v(rng);
  const Raster a = pansharpen_brovey(pan, msi, {0.2, 0.5, 0.3});
  const Raster b = reference::pansharpen_brovey(pan, msi, {0.2, 0.5, 0.3});
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.samples()[i], b.samples()[i], 1e-4);
}
