// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#include "satrecon/raster.hpp"

#include <algorithm>
#include <string>

#include <Eigen/LU>

#include "satrecon/error.hpp"

namespace satrecon {

namespace {

void check_geometry(int width, int height, int channels) {
  if (width < 0 || height < 0) throw InvalidArgument("raster dimensions must be non-negative");
  if (channels < 1 || channels > 4) throw InvalidArgument("raster channel count must be 1..4");
}

}  // namespace

Raster::Raster(int width, int height, int channels, float fill, float nodata)
    : width_(width), height_(height), channels_(channels), nodata_(nodata) {
  check_geometry(width, height, channels);
  samples_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Raster::Raster(int width, int height, int channels, std::vector<float> samples, float nodata)
    : width_(width), height_(height), channels_(channels), nodata_(nodata),
      samples_(std::move(samples)) {
  check_geometry(width, height, channels);
  if (samples_.size() != static_cast<std::size_t>(width) * height * channels) {
    throw InvalidArgument("sample count " + std::to_string(samples_.size()) +
                          " does not match " + std::to_string(width) + "x" +
                          std::to_string(height) + "x" + std::to_string(channels));
  }
  validate();
}

Raster Raster::blank_like(int channels) const {
  return Raster(width_, height_, channels > 0 ? channels : channels_, nodata_, nodata_);
}

Raster Raster::channel(int c) const {
  if (c < 0 || c >= channels_) throw InvalidArgument("channel index out of range");
  Raster out(width_, height_, 1, nodata_, nodata_);
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x) out.at(x, y) = at(x, y, c);
  return out;
}

void Raster::validate() const {
  for (float v : samples_) {
    if (!is_nodata(v) && !std::isfinite(v)) {
      throw InvalidArgument("raster contains a non-finite sample that is not nodata");
    }
  }
}

// ---------------------------------------------------------------------------

AffineMap2D::AffineMap2D(const Eigen::Matrix3d& m) : m_(m) {
  if (!m.allFinite()) throw InvalidArgument("affine map has non-finite entries");
  if (m(2, 0) != 0.0 || m(2, 1) != 0.0 || m(2, 2) != 1.0) {
    throw InvalidArgument("affine map bottom row must be (0, 0, 1)");
  }
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (!(std::abs(det) > 1e-12)) throw InvalidArgument("affine map is not invertible");
}

AffineMap2D AffineMap2D::translation(double tx, double ty) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 2) = tx;
  m(1, 2) = ty;
  return AffineMap2D(m);
}

AffineMap2D AffineMap2D::inverse() const {
  Eigen::Matrix3d inv = m_.inverse();
  inv.row(2) << 0.0, 0.0, 1.0;
  return AffineMap2D(inv);
}

// ---------------------------------------------------------------------------

std::array<double, 4> catmull_rom_weights(double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return {0.5 * (-t3 + 2.0 * t2 - t),
          0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
          0.5 * (-3.0 * t3 + 4.0 * t2 + t),
          0.5 * (t3 - t2)};
}

namespace {

// Interpolates every channel at (x, y) into `out`. A channel is nodata when
// the location is unmappable or a tap with nonzero weight is nodata.
void cubic_sample_all(const Raster& r, double x, double y, float* out) {
  const int w = r.width();
  const int h = r.height();
  const int nc = r.channels();
  if (!(x >= -0.5 && x <= w - 0.5 && y >= -0.5 && y <= h - 0.5)) {
    for (int c = 0; c < nc; ++c) out[c] = r.nodata();
    return;
  }

  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const auto wx = catmull_rom_weights(x - fx);
  const auto wy = catmull_rom_weights(y - fy);

  int xs[4], ys[4];
  for (int i = 0; i < 4; ++i) {
    xs[i] = std::clamp(x0 - 1 + i, 0, w - 1);
    ys[i] = std::clamp(y0 - 1 + i, 0, h - 1);
  }

  for (int c = 0; c < nc; ++c) {
    double acc = 0.0;
    bool valid = true;
    for (int j = 0; j < 4 && valid; ++j) {
      if (wy[j] == 0.0) continue;
      double row = 0.0;
      for (int i = 0; i < 4; ++i) {
        if (wx[i] == 0.0) continue;
        const float v = r.at(xs[i], ys[j], c);
        if (r.is_nodata(v)) {
          valid = false;
          break;
        }
        row += wx[i] * v;
      }
      acc += wy[j] * row;
    }
    out[c] = valid ? static_cast<float>(acc) : r.nodata();
  }
}

}  // namespace

float cubic_interpolate(const Raster& raster, double x, double y, int channel) {
  if (channel < 0 || channel >= raster.channels()) {
    throw InvalidArgument("channel " + std::to_string(channel) + " out of range");
  }
  if (raster.empty()) return raster.nodata();
  const Raster& r = raster;
  const int w = r.width();
  const int h = r.height();
  if (!(x >= -0.5 && x <= w - 0.5 && y >= -0.5 && y <= h - 0.5)) return r.nodata();

  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const auto wx = catmull_rom_weights(x - fx);
  const auto wy = catmull_rom_weights(y - fy);

  double acc = 0.0;
  for (int j = 0; j < 4; ++j) {
    if (wy[j] == 0.0) continue;
    const int yy = std::clamp(y0 - 1 + j, 0, h - 1);
    double row = 0.0;
    for (int i = 0; i < 4; ++i) {
      if (wx[i] == 0.0) continue;
      const float v = r.at(std::clamp(x0 - 1 + i, 0, w - 1), yy, channel);
      if (r.is_nodata(v)) return r.nodata();
      row += wx[i] * v;
    }
    acc += wy[j] * row;
  }
  return static_cast<float>(acc);
}

Raster warp_affine(const Raster& raster, const AffineMap2D& map) {
  Raster out = raster.blank_like();
  const int w = raster.width();
  const int h = raster.height();
  const int nc = raster.channels();

#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    float px[4];
    for (int x = 0; x < w; ++x) {
      const Eigen::Vector2d src = map.apply(x, y);
      cubic_sample_all(raster, src.x(), src.y(), px);
      for (int c = 0; c < nc; ++c) out.at(x, y, c) = px[c];
    }
  }
  return out;
}

Raster crop(const Raster& raster, int x0, int y0, int w, int h) {
  if (x0 < 0 || y0 < 0 || w < 0 || h < 0 || x0 + w > raster.width() || y0 + h > raster.height()) {
    throw InvalidArgument("crop rectangle does not fit inside the raster");
  }
  Raster out(w, h, raster.channels(), raster.nodata(), raster.nodata());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < raster.channels(); ++c) out.at(x, y, c) = raster.at(x0 + x, y0 + y, c);
  return out;
}

}  // namespace satrecon
