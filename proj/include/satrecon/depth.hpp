// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "satrecon/camera.hpp"
#include "satrecon/raster.hpp"

namespace satrecon::depth {

using Mat4 = Eigen::Matrix4d;
using Mat34 = Eigen::Matrix<double, 3, 4>;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;

/// Plane-plus-parallax projection
///
///   P = [ rows of the 3x4 projection ]
///       [ 0  0  z_bar  -z_bar*d      ]
///
/// mapping homogeneous world points to (uZ, vZ, Z, mZ). Both P and its
/// inverse are stored normalized: `p` = n_p * P and `p_inv` = n_p_inv * P^-1,
/// where the build step picks n = 1 / max|entry|. Any other (matrix, factor)
/// pair with the same product is equally valid.
struct ReparamProjection {
  Mat4 p = Mat4::Identity();
  Mat4 p_inv = Mat4::Identity();
  double n_p = 1.0;
  double n_p_inv = 1.0;
  double z_bar = 1.0;
  double d = 0.0;

  /// The unnormalized 3x4 projection (first three rows of p / n_p).
  Mat34 projection3x4() const;
};

/// Throws InvalidArgument for z_bar <= 0 or non-finite input and
/// SingularError when the 4x4 matrix is singular (e.g. the plane z = d
/// contains the camera center).
ReparamProjection build_reparam(const Mat34& p3x4, double z_bar, double d);

/// Mean camera-frame depth (third row of the projection) over `points`.
double mean_depth(const Mat34& p3x4, std::span<const Vec3> points);

struct ReparamSample {
  double u = 0.0;
  double v = 0.0;
  double m = 0.0;
  double z = 0.0;  ///< conventional depth, for reference
};

/// u, v and m = z_bar*(z - d)/Z for a world point. Throws SingularError when
/// the conventional depth Z is not positive.
ReparamSample forward_reparam_depth(const ReparamProjection& rp, const Vec3& world_point);

/// Z = n_p_inv / ((p_inv)_4 . [u, v, 1, m]). Throws SingularError when the
/// dot product is below 1e-14 in magnitude.
double recover_depth(const ReparamProjection& rp, double u, double v, double m);

/// World point on the ray through (u, v) with parameterized depth m.
Vec3 backproject(const ReparamProjection& rp, double u, double v, double m);

enum class DepthKind { Reparameterized, Metric };

struct DepthMap {
  Raster raster;  ///< single channel
  DepthKind kind = DepthKind::Reparameterized;
  std::string camera_id;
};

/// Applies recover_depth per valid pixel (pixel (x, y) is (u, v)). Pixels at
/// infinity or with non-positive depth become nodata. Parallel over rows.
DepthMap recover_depth_map(const DepthMap& dm, const ReparamProjection& rp);

/// D_s = warp of D_p by t_sp, values resampled as plain scalars with the
/// raster module's cubic kernel.
DepthMap skew_correct_depth_map(const DepthMap& dm, const Eigen::Matrix3d& t_sp);

/// The projection that goes with a skew-corrected depth map: first three rows
/// become t_sp^-1 * P(3x4), z_bar and d unchanged.
ReparamProjection skew_correct_reparam(const ReparamProjection& rp, const Eigen::Matrix3d& t_sp);

/// A recovered (metric) depth map with the projection it was computed under.
struct View {
  DepthMap depth;  ///< kind must be Metric
  ReparamProjection projection;
};

struct FusionOptions {
  /// A point from view i is kept when at least this many other views see a
  /// surface within `tolerance` of the point's depth in that view.
  int min_consistent_views = 2;
  double tolerance = 0.1;   ///< meters, along the other view's ray
};

/// Back-projects every valid pixel of every view to world space and keeps the
/// points passing the multi-view depth consistency check.
std::vector<Vec3> fuse_depth_maps(std::span<const View> views, const FusionOptions& options = {});

}  // namespace satrecon::depth
