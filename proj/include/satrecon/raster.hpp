// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace satrecon {

inline constexpr float kNoData = std::numeric_limits<float>::quiet_NaN();

/// Row-major, channel-interleaved grid of 32-bit floats. Sample (x, y) sits
/// at continuous pixel coordinate (x, y); pixel centers are on integers.
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, int channels, float fill = kNoData, float nodata = kNoData);
  /// Takes ownership of `samples`; throws InvalidArgument when the length does
  /// not equal width * height * channels or a non-nodata sample is not finite.
  Raster(int width, int height, int channels, std::vector<float> samples, float nodata = kNoData);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  float nodata() const { return nodata_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  bool is_nodata(float v) const {
    return std::isnan(nodata_) ? std::isnan(v) : v == nodata_;
  }

  std::size_t index(int x, int y, int c = 0) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }
  float at(int x, int y, int c = 0) const { return samples_[index(x, y, c)]; }
  float& at(int x, int y, int c = 0) { return samples_[index(x, y, c)]; }

  std::span<const float> samples() const { return samples_; }
  std::span<float> samples() { return samples_; }

  /// Same geometry and nodata, every sample set to nodata.
  Raster blank_like(int channels = 0) const;

  /// Copies one channel into a single-channel raster.
  Raster channel(int c) const;

  /// Throws InvalidArgument if a non-nodata sample is NaN or infinite.
  void validate() const;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  float nodata_ = kNoData;
  std::vector<float> samples_;
};

/// Planar affine map on homogeneous pixel coordinates; bottom row (0, 0, 1).
class AffineMap2D {
 public:
  /// Throws InvalidArgument when the bottom row is not (0, 0, 1) or the
  /// linear part has |det| <= 1e-12.
  explicit AffineMap2D(const Eigen::Matrix3d& m);

  static AffineMap2D identity() { return AffineMap2D(Eigen::Matrix3d::Identity()); }
  static AffineMap2D translation(double tx, double ty);

  const Eigen::Matrix3d& matrix() const { return m_; }
  AffineMap2D inverse() const;

  Eigen::Vector2d apply(double x, double y) const {
    return {m_(0, 0) * x + m_(0, 1) * y + m_(0, 2), m_(1, 0) * x + m_(1, 1) * y + m_(1, 2)};
  }

 private:
  Eigen::Matrix3d m_;
};

/// Catmull-Rom weight for offset t in [0, 1) at taps -1, 0, 1, 2.
std::array<double, 4> catmull_rom_weights(double t);

/// Bicubic (Catmull-Rom, a = -0.5) sample with clamp-to-edge support. Returns
/// the raster's nodata when (x, y) lies outside [-0.5, w-0.5] x [-0.5, h-0.5]
/// or a support sample with nonzero weight is nodata. Queries on the lattice
/// therefore return the stored sample.
float cubic_interpolate(const Raster& raster, double x, double y, int channel);

/// Inverse-mapping warp: output pixel p samples the input at map * p. Output
/// canvas equals the input canvas; unmappable pixels become nodata. Rows are
/// processed in parallel.
Raster warp_affine(const Raster& raster, const AffineMap2D& map);

/// Copy of the sub-rectangle [x0, x0+w) x [y0, y0+h); throws when it does not
/// fit inside the raster.
Raster crop(const Raster& raster, int x0, int y0, int w, int h);

}  // namespace satrecon
