// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#include "satrecon/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "satrecon/error.hpp"
#include "satrecon/preprocess.hpp"

namespace satrecon::reference {

double cubic_kernel(double x) {
  constexpr double a = -0.5;
  x = std::abs(x);
  if (x <= 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
  return 0.0;
}

float cubic_interpolate(const Raster& r, double x, double y, int channel) {
  if (channel < 0 || channel >= r.channels()) throw InvalidArgument("channel out of range");
  if (x < -0.5 || x > r.width() - 0.5 || y < -0.5 || y > r.height() - 0.5 || std::isnan(x) ||
      std::isnan(y)) {
    return r.nodata();
  }
  const int xi = static_cast<int>(std::floor(x));
  const int yi = static_cast<int>(std::floor(y));
  double acc = 0.0;
  for (int n = yi - 1; n <= yi + 2; ++n) {
    for (int m = xi - 1; m <= xi + 2; ++m) {
      const int cx = std::min(std::max(m, 0), r.width() - 1);
      const int cy = std::min(std::max(n, 0), r.height() - 1);
      const double k = cubic_kernel(x - m) * cubic_kernel(y - n);
      if (k == 0.0) continue;
      const float v = r.at(cx, cy, channel);
      if (r.is_nodata(v)) return r.nodata();
      acc += v * k;
    }
  }
  return static_cast<float>(acc);
}

Raster warp_affine(const Raster& raster, const Eigen::Matrix3d& map) {
  Raster out = raster.blank_like();
  for (int y = 0; y < raster.height(); ++y) {
    for (int x = 0; x < raster.width(); ++x) {
      const Eigen::Vector3d src = map * Eigen::Vector3d(x, y, 1.0);
      for (int c = 0; c < raster.channels(); ++c) {
        out.at(x, y, c) = reference::cubic_interpolate(raster, src.x(), src.y(), c);
      }
    }
  }
  return out;
}

namespace {

std::array<float, 2> sorted_percentiles(const Raster& r, int c, double lo, double hi) {
  std::vector<float> v;
  for (int y = 0; y < r.height(); ++y)
    for (int x = 0; x < r.width(); ++x)
      if (!r.is_nodata(r.at(x, y, c))) v.push_back(r.at(x, y, c));
  if (v.empty()) throw InvalidArgument("channel has no valid samples");
  std::sort(v.begin(), v.end());
  auto pick = [&](double p) {
    const double pos = p / 100.0 * static_cast<double>(v.size() - 1);
    return v[std::min(v.size() - 1, static_cast<std::size_t>(std::floor(pos + 0.5)))];
  };
  return {pick(lo), pick(hi)};
}

}  // namespace

Raster percentile_clip(const Raster& raster, double lo, double hi) {
  Raster out = raster;
  for (int c = 0; c < raster.channels(); ++c) {
    const auto [plo, phi] = sorted_percentiles(raster, c, lo, hi);
    for (int y = 0; y < raster.height(); ++y)
      for (int x = 0; x < raster.width(); ++x) {
        float& v = out.at(x, y, c);
        if (out.is_nodata(v)) continue;
        if (v < plo) v = plo;
        if (v > phi) v = phi;
      }
  }
  return out;
}

Raster tonemap(const Raster& raster, double lo, double hi) {
  Raster out = percentile_clip(raster, lo, hi);
  for (int c = 0; c < raster.channels(); ++c) {
    const auto [mn, mx] = sorted_percentiles(out, c, 0.0, 100.0);
    for (int y = 0; y < raster.height(); ++y)
      for (int x = 0; x < raster.width(); ++x) {
        float& v = out.at(x, y, c);
        if (out.is_nodata(v)) continue;
        const double norm = mx > mn ? (double(v) - mn) / (double(mx) - mn) : 0.0;
        v = static_cast<float>(std::floor(255.0 * std::pow(norm, 1.0 / 2.2) + 0.5));
      }
  }
  return out;
}

Raster pansharpen_brovey(const Raster& pan, const Raster& msi, const std::array<double, 3>& weights) {
  const double wsum = weights[0] + weights[1] + weights[2];
  Raster out(pan.width(), pan.height(), 3);
  const double rx = double(msi.width()) / pan.width();
  const double ry = double(msi.height()) / pan.height();
  for (int y = 0; y < pan.height(); ++y) {
    for (int x = 0; x < pan.width(); ++x) {
      double m[3];
      bool ok = !pan.is_nodata(pan.at(x, y));
      for (int c = 0; c < 3; ++c) {
        const float v = (msi.width() == pan.width() && msi.height() == pan.height())
                            ? msi.at(x, y, c)
                            : reference::cubic_interpolate(msi, (x + 0.5) * rx - 0.5, (y + 0.5) * ry - 0.5, c);
        ok = ok && !msi.is_nodata(v);
        m[c] = v;
      }
      if (!ok) continue;
      const double denom =
          weights[0] / wsum * m[0] + weights[1] / wsum * m[1] + weights[2] / wsum * m[2];
      if (std::abs(denom) < 1e-6) continue;
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = static_cast<float>(m[c] * (pan.at(x, y) / denom));
    }
  }
  return out;
}

depth::DepthMap recover_depth_map(const depth::DepthMap& dm, const depth::ReparamProjection& rp) {
  if (dm.kind != depth::DepthKind::Reparameterized) throw InvalidArgument("expects kind m");
  depth::DepthMap out{dm.raster.blank_like(), depth::DepthKind::Metric, dm.camera_id};
  for (int y = 0; y < dm.raster.height(); ++y) {
    for (int x = 0; x < dm.raster.width(); ++x) {
      const float m = dm.raster.at(x, y);
      if (dm.raster.is_nodata(m)) continue;
      const double dot = rp.p_inv(3, 0) * x + rp.p_inv(3, 1) * y + rp.p_inv(3, 2) + rp.p_inv(3, 3) * m;
      if (std::abs(dot) < 1e-14) continue;
      const double z = rp.n_p_inv * (1.0 / dot);
      if (z > 0.0 && std::isfinite(z)) out.raster.at(x, y) = static_cast<float>(z);
    }
  }
  return out;
}

eval::HeightGrid rasterize_height(std::span<const eval::Vec3> points, const eval::GridSpec& spec) {
  eval::HeightGrid g = eval::HeightGrid::empty(spec);
  for (const auto& p : points) {
    const double fi = std::floor((p.x() - spec.origin_e) / spec.cell);
    const double fj = std::floor((p.y() - spec.origin_n) / spec.cell);
    if (fi < 0 || fj < 0 || fi >= spec.nx || fj >= spec.ny || !std::isfinite(p.z())) continue;
    float& h = g.at(static_cast<int>(fi), static_cast<int>(fj));
    const auto z = static_cast<float>(p.z());
    if (std::isnan(h) || z > h) h = z;
  }
  return g;
}

eval::HeightGrid fill_holes(const eval::HeightGrid& grid) {
  eval::HeightGrid out = grid;
  for (int j = 0; j < grid.spec.ny; ++j) {
    for (int i = 0; i < grid.spec.nx; ++i) {
      if (!std::isnan(grid.at(i, j))) continue;
      std::vector<double> nb;
      for (int b = j - 1; b <= j + 1; ++b)
        for (int a = i - 1; a <= i + 1; ++a) {
          if ((a == i && b == j) || a < 0 || b < 0 || a >= grid.spec.nx || b >= grid.spec.ny) continue;
          if (!std::isnan(grid.at(a, b))) nb.push_back(grid.at(a, b));
        }
      if (nb.size() < 5) continue;
      std::sort(nb.begin(), nb.end());
      const std::size_t n = nb.size();
      const double med = n % 2 ? nb[n / 2] : 0.5 * (nb[n / 2 - 1] + nb[n / 2]);
      out.at(i, j) = static_cast<float>(med);
    }
  }
  return out;
}

}  // namespace satrecon::reference
