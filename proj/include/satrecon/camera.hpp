// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>

#include <Eigen/Core>

namespace satrecon::camera {

using Mat3 = Eigen::Matrix3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Calibration of a finite projective camera:
///
///   K = [ fx  s  px ]
///       [  0 fy  py ]
///       [  0  0   1 ]
///
/// A skew-free calibration is the same type with s == 0.
struct FpcIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double s = 0.0;
  double px = 0.0;
  double py = 0.0;

  /// Throws InvalidArgument unless fx > 0, fy > 0 and all entries are finite.
  void validate() const;
  Mat3 as_matrix() const;

  bool operator==(const FpcIntrinsics&) const = default;
};

/// Pinhole camera with world-to-camera pose: p_c = R * X + t.
struct FpcCamera {
  FpcIntrinsics intrinsics;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  /// Checks the intrinsics and that `rotation` is orthonormal with det +1
  /// (to 1e-9).
  void validate() const;

  /// K * [R | t].
  Mat34 projection_matrix() const;

  /// Camera center in world coordinates, -R^T t.
  Vec3 center() const;
};

/// K_p = t_sp * K_s, with t_sp translation-free.
struct SkewDecomposition {
  FpcIntrinsics k_s;
  Mat3 t_sp = Mat3::Identity();
};

/// Closed-form inverse of an upper-triangular calibration matrix.
Mat3 fpc_invert(const FpcIntrinsics& k);

/// T such that K_p = T * K_p', i.e. T = K_p * K_p'^-1.
Mat3 transform_between(const FpcIntrinsics& k_p, const FpcIntrinsics& k_p_prime);

/// Splits K_p into a skew-free calibration with shifted principal point and a
/// pure shear [[1, s/fy, 0], [0, 1, 0], [0, 0, 1]]. The shift of px is what
/// keeps the shear free of a translation term, so warping an image by it does
/// not push content off the canvas.
SkewDecomposition decompose_skew(const FpcIntrinsics& k_p);

/// Camera-frame depth at or below this is treated as non-projectable.
inline constexpr double kMinProjectableDepth = 1e-12;

/// Projects a world point to pixel coordinates; nullopt when the point is not
/// in front of the camera.
std::optional<Vec2> fpc_project(const FpcCamera& cam, const Vec3& world_point);

/// Same camera pose with different intrinsics.
FpcCamera with_intrinsics(const FpcCamera& cam, const FpcIntrinsics& k);

// ---------------------------------------------------------------------------
// Rational polynomial camera

using RpcCoefficients = std::array<double, 20>;

/// Cubic RPC in the RPC00B term order:
///   1, L, P, H, LP, LH, PH, L^2, P^2, H^2, PLH, L^3, LP^2, LH^2, L^2P, P^3,
///   PH^2, L^2H, P^2H, H^3
/// with L, P, H the normalized longitude, latitude and height.
struct RpcCamera {
  RpcCoefficients line_num{};
  RpcCoefficients line_den{};
  RpcCoefficients samp_num{};
  RpcCoefficients samp_den{};
  double lat_off = 0.0, lat_scale = 1.0;
  double lon_off = 0.0, lon_scale = 1.0;
  double height_off = 0.0, height_scale = 1.0;
  double line_off = 0.0, line_scale = 1.0;
  double samp_off = 0.0, samp_scale = 1.0;

  /// Throws InvalidArgument when a scale is zero or a denominator's constant
  /// term is zero.
  void validate() const;

  /// Divides each numerator/denominator pair by the denominator's constant
  /// term so that term becomes exactly 1. Applied by the document loader.
  void normalize_denominators();
};

/// The 20 RPC00B monomials at normalized (lon, lat, height).
RpcCoefficients rpc_terms(double l, double p, double h);

struct RpcPixel {
  double sample = 0.0;
  double line = 0.0;
  /// Set when a normalized input coordinate exceeds 1.5 in magnitude.
  bool out_of_validity = false;
};

/// Throws SingularError when a denominator magnitude drops below 1e-10.
RpcPixel rpc_project(const RpcCamera& rpc, double lat_deg, double lon_deg, double height_m);

}  // namespace satrecon::camera
