// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Serial reference versions of the OpenMP kernels. They are written
// independently of the parallel code paths (plain loops, full sorts, the
// textbook cubic-convolution kernel) and exist so tests and the benchmark can
// compare against them.

#include <array>
#include <span>

#include "satrecon/depth.hpp"
#include "satrecon/eval.hpp"
#include "satrecon/raster.hpp"

namespace satrecon::reference {

/// Keys cubic convolution kernel with a = -0.5, evaluated at distance x.
double cubic_kernel(double x);

float cubic_interpolate(const Raster& raster, double x, double y, int channel);
Raster warp_affine(const Raster& raster, const Eigen::Matrix3d& map);

Raster percentile_clip(const Raster& raster, double lo, double hi);
Raster tonemap(const Raster& raster, double lo, double hi);
Raster pansharpen_brovey(const Raster& pan, const Raster& msi, const std::array<double, 3>& weights);

depth::DepthMap recover_depth_map(const depth::DepthMap& dm, const depth::ReparamProjection& rp);

eval::HeightGrid rasterize_height(std::span<const eval::Vec3> points, const eval::GridSpec& spec);
eval::HeightGrid fill_holes(const eval::HeightGrid& grid);

}  // namespace satrecon::reference
