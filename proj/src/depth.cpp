// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#include "satrecon/depth.hpp"

#include <cmath>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include "satrecon/error.hpp"

namespace satrecon::depth {

namespace {

double max_abs(const Mat4& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

Mat34 ReparamProjection::projection3x4() const { return p.topRows<3>() / n_p; }

ReparamProjection build_reparam(const Mat34& p3x4, double z_bar, double d) {
  if (!p3x4.allFinite() || !std::isfinite(z_bar) || !std::isfinite(d)) {
    throw InvalidArgument("reparameterization inputs must be finite");
  }
  if (!(z_bar > 0.0)) throw InvalidArgument("z_bar must be positive");

  Mat4 full;
  full.topRows<3>() = p3x4;
  full.row(3) << 0.0, 0.0, z_bar, -z_bar * d;

  // Hadamard ratio on the column-equilibrated matrix: scale-free in both the
  // pixel and the world units.
  Mat4 eq = full;
  for (int c = 0; c < 4; ++c) {
    const double m = eq.col(c).cwiseAbs().maxCoeff();
    if (m > 0.0) eq.col(c) /= m;
  }
  double row_norms = 1.0;
  for (int r = 0; r < 4; ++r) row_norms *= eq.row(r).norm();
  const Eigen::FullPivLU<Mat4> eq_lu(eq);
  if (!(row_norms > 0.0) || std::abs(eq_lu.determinant()) <= 1e-12 * row_norms) {
    throw SingularError("reparameterized projection is singular (plane through camera center?)");
  }
  const Eigen::FullPivLU<Mat4> lu(full);
  const Mat4 inv = lu.inverse();

  ReparamProjection rp;
  rp.z_bar = z_bar;
  rp.d = d;
  rp.n_p = 1.0 / max_abs(full);
  rp.n_p_inv = 1.0 / max_abs(inv);
  rp.p = rp.n_p * full;
  rp.p_inv = rp.n_p_inv * inv;
  return rp;
}

double mean_depth(const Mat34& p3x4, std::span<const Vec3> points) {
  if (points.empty()) throw InvalidArgument("mean depth of an empty point set");
  double acc = 0.0;
  for (const auto& x : points) acc += p3x4.row(2).dot(x.homogeneous());
  return acc / static_cast<double>(points.size());
}

ReparamSample forward_reparam_depth(const ReparamProjection& rp, const Vec3& world_point) {
  const Vec4 h = rp.p * world_point.homogeneous();
  const double z = h(2) / rp.n_p;
  if (!(z > 1e-12)) throw SingularError("point is not in front of the camera");
  // u, v and m are ratios, so the normalization of p cancels.
  return ReparamSample{h(0) / h(2), h(1) / h(2), h(3) / h(2), z};
}

double recover_depth(const ReparamProjection& rp, double u, double v, double m) {
  const double dot = rp.p_inv.row(3).dot(Vec4(u, v, 1.0, m));
  if (!(std::abs(dot) >= 1e-14)) throw SingularError("reparameterized depth maps to infinity");
  return rp.n_p_inv * (1.0 / dot);
}

Vec3 backproject(const ReparamProjection& rp, double u, double v, double m) {
  // p_inv * [u v 1 m] = n_p_inv * [x/Z, y/Z, z/Z, 1/Z].
  const Vec4 q = rp.p_inv * Vec4(u, v, 1.0, m);
  if (!(std::abs(q(3)) >= 1e-14)) throw SingularError("reparameterized depth maps to infinity");
  return q.head<3>() / q(3);
}

DepthMap recover_depth_map(const DepthMap& dm, const ReparamProjection& rp) {
  if (dm.kind != DepthKind::Reparameterized) {
    throw InvalidArgument("recover_depth_map expects a reparameterized depth map");
  }
  if (dm.raster.channels() != 1) throw InvalidArgument("depth maps have one channel");

  DepthMap out{dm.raster.blank_like(), DepthKind::Metric, dm.camera_id};
  const Raster& in = dm.raster;
  const Eigen::RowVector4d row = rp.p_inv.row(3);
  const int w = in.width();
  const int h = in.height();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float m = in.at(x, y);
      if (in.is_nodata(m)) continue;
      const double dot = row.dot(Vec4(x, y, 1.0, m));
      if (!(std::abs(dot) >= 1e-14)) continue;
      const double z = rp.n_p_inv * (1.0 / dot);
      if (z > 0.0 && std::isfinite(z)) out.raster.at(x, y) = static_cast<float>(z);
    }
  }
  return out;
}

DepthMap skew_correct_depth_map(const DepthMap& dm, const Eigen::Matrix3d& t_sp) {
  if (dm.raster.channels() != 1) throw InvalidArgument("depth maps have one channel");
  return DepthMap{warp_affine(dm.raster, AffineMap2D(t_sp)), dm.kind, dm.camera_id};
}

ReparamProjection skew_correct_reparam(const ReparamProjection& rp, const Eigen::Matrix3d& t_sp) {
  const AffineMap2D map(t_sp);
  const Mat34 corrected = map.inverse().matrix() * rp.projection3x4();
  return build_reparam(corrected, rp.z_bar, rp.d);
}

// ---------------------------------------------------------------------------

namespace {

// Conventional depth of a world point and its pixel in a view; false when
// behind the camera.
bool project_view(const ReparamProjection& rp, const Vec3& x, double& u, double& v, double& z) {
  const Vec4 h = rp.p * x.homogeneous();
  if (!(h(2) > 0.0)) return false;
  u = h(0) / h(2);
  v = h(1) / h(2);
  z = h(2) / rp.n_p;
  return true;
}

}  // namespace

std::vector<Vec3> fuse_depth_maps(std::span<const View> views, const FusionOptions& options) {
  for (const auto& view : views) {
    if (view.depth.kind != DepthKind::Metric) {
      throw InvalidArgument("fusion expects metric depth maps");
    }
  }
  if (options.min_consistent_views < 0 || !(options.tolerance > 0.0)) {
    throw InvalidArgument("invalid fusion options");
  }

  // P(3x4) X = Z [u, v, 1] gives X = M^-1 (Z [u, v, 1] - p4).
  std::vector<Eigen::PartialPivLU<Eigen::Matrix3d>> rays;
  std::vector<Vec3> offsets;
  for (const auto& view : views) {
    const Mat34 p = view.projection.projection3x4();
    rays.emplace_back(p.leftCols<3>());
    offsets.push_back(p.col(3));
  }

  std::vector<Vec3> fused;
  for (std::size_t vi = 0; vi < views.size(); ++vi) {
    const auto& src = views[vi];
    const Raster& zmap = src.depth.raster;
    const int w = zmap.width();
    const int h = zmap.height();
    std::vector<std::vector<Vec3>> rows(static_cast<std::size_t>(h));

#pragma omp parallel for schedule(dynamic, 8)
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const float z = zmap.at(x, y);
        if (zmap.is_nodata(z)) continue;
        const Vec3 point = rays[vi].solve(double(z) * Vec3(double(x), double(y), 1.0) - offsets[vi]);

        int agree = 0;
        for (std::size_t vj = 0; vj < views.size() && agree < options.min_consistent_views; ++vj) {
          if (vj == vi) continue;
          const auto& other = views[vj];
          double u, v, zz;
          if (!project_view(other.projection, point, u, v, zz)) continue;
          const int ix = static_cast<int>(std::floor(u + 0.5));
          const int iy = static_cast<int>(std::floor(v + 0.5));
          const Raster& oz = other.depth.raster;
          if (ix < 0 || iy < 0 || ix >= oz.width() || iy >= oz.height()) continue;
          const float seen = oz.at(ix, iy);
          if (oz.is_nodata(seen)) continue;
          if (std::abs(static_cast<double>(seen) - zz) <= options.tolerance) ++agree;
        }
        if (agree >= options.min_consistent_views) rows[static_cast<std::size_t>(y)].push_back(point);
      }
    }
    for (auto& r : rows) fused.insert(fused.end(), r.begin(), r.end());
  }
  return fused;
}

}  // namespace satrecon::depth
