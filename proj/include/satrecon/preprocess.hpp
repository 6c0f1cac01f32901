// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <vector>

#include "satrecon/camera.hpp"
#include "satrecon/raster.hpp"
#include "satrecon/utm.hpp"

namespace satrecon::preprocess {

enum class SensorKind { Panchromatic, Multispectral };

struct SceneMetadata {
  std::string id;
  double cloud_cover = 0.0;  ///< fraction in [0, 1]
  std::string timestamp;     ///< ISO-8601, informational
  SensorKind sensor = SensorKind::Panchromatic;

  void validate() const;
};

/// Keeps scenes whose cloud cover does not exceed `threshold`, in input order.
std::vector<SceneMetadata> filter_by_cloud_cover(const std::vector<SceneMetadata>& scenes,
                                                 double threshold = 0.5);

/// UTM bounding box. A degenerate (zero-extent) box is accepted.
struct AoiBox {
  double e_min = 0.0, n_min = 0.0, e_max = 0.0, n_max = 0.0;
  int zone = 1;
  utm::Hemisphere hemisphere = utm::Hemisphere::North;

  void validate() const;
};

/// Half-open integer pixel rectangle [x, x+width) x [y, y+height).
struct PixelBox {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  bool operator==(const PixelBox&) const = default;
};

/// Projects the AOI corners at `height_m` through the RPC, takes the integer
/// hull (floor of minima, ceil of maxima, at least one pixel per axis) and
/// clips it to the image. Throws EmptyResult when nothing remains.
PixelBox aoi_to_pixel_bbox(const camera::RpcCamera& rpc, const AoiBox& aoi, double height_m,
                           int image_width, int image_height);

/// Per-channel clamp to the [lo, hi] percentiles of the valid samples.
///
/// Percentile p of N sorted values is the one at index round(p/100 * (N-1))
/// (half-up). Nodata is skipped and preserved.
Raster percentile_clip(const Raster& raster, double lo = 0.5, double hi = 99.5);

/// Percentile value of `values` under the rule above; `values` is reordered.
float nearest_rank_percentile(std::vector<float>& values, double percent);

/// percentile_clip -> per-channel min-max to [0, 1] -> gamma 1/2.2 -> [0, 255],
/// rounded half-up. A channel whose clipped range is empty maps to 0.
Raster tonemap(const Raster& raster, double lo = 0.5, double hi = 99.5);

/// The gamma + quantization step alone, for a value already in [0, 1].
float tonemap_normalized(double v);

/// Weighted Brovey pan-sharpening. `msi` is resampled to the pan grid with
/// cubic interpolation (pixel-center aligned) and each band is scaled by
/// pan / sum_k(w_k * msi_k) with weights normalized to sum 1. Pixels whose
/// denominator is below 1e-6 become nodata.
Raster pansharpen_brovey(const Raster& pan, const Raster& msi,
                         const std::array<double, 3>& weights = {1.0 / 3, 1.0 / 3, 1.0 / 3});

}  // namespace satrecon::preprocess
