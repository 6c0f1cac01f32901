// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#include "satrecon/camera.hpp"

#include <cmath>
#include <string>

#include <Eigen/LU>

#include "satrecon/error.hpp"

namespace satrecon::camera {

void FpcIntrinsics::validate() const {
  if (!(std::isfinite(fx) && std::isfinite(fy) && std::isfinite(s) &&
        std::isfinite(px) && std::isfinite(py))) {
    throw InvalidArgument("intrinsics contain a non-finite value");
  }
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw InvalidArgument("focal lengths must be positive (fx=" + std::to_string(fx) +
                          ", fy=" + std::to_string(fy) + ")");
  }
}

Mat3 FpcIntrinsics::as_matrix() const {
  Mat3 k;
  k << fx, s, px,
       0.0, fy, py,
       0.0, 0.0, 1.0;
  return k;
}

void FpcCamera::validate() const {
  intrinsics.validate();
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw InvalidArgument("camera pose contains a non-finite value");
  }
  const double ortho = (rotation * rotation.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
  const double det = rotation.determinant();
  if (ortho >= 1e-9 || std::abs(det - 1.0) > 1e-9) {
    throw InvalidArgument("rotation is not a proper orthonormal matrix");
  }
}

Mat34 FpcCamera::projection_matrix() const {
  Mat34 rt;
  rt.leftCols<3>() = rotation;
  rt.col(3) = translation;
  return intrinsics.as_matrix() * rt;
}

Vec3 FpcCamera::center() const { return -rotation.transpose() * translation; }

Mat3 fpc_invert(const FpcIntrinsics& k) {
  k.validate();
  const double fxfy = k.fx * k.fy;
  Mat3 inv;
  inv << 1.0 / k.fx, -k.s / fxfy, k.py * k.s / fxfy - k.px / k.fx,
         0.0, 1.0 / k.fy, -k.py / k.fy,
         0.0, 0.0, 1.0;
  return inv;
}

Mat3 transform_between(const FpcIntrinsics& k_p, const FpcIntrinsics& k_p_prime) {
  k_p.validate();
  k_p_prime.validate();
  const auto& a = k_p;
  const auto& b = k_p_prime;
  const double fxfy_b = b.fx * b.fy;
  Mat3 t;
  t << a.fx / b.fx,
       -a.fx * b.s / fxfy_b + a.s / b.fy,
       a.fx * b.py * b.s / fxfy_b - a.fx * b.px / b.fx - b.py * a.s / b.fy + a.px,
       0.0, a.fy / b.fy, -a.fy * b.py / b.fy + a.py,
       0.0, 0.0, 1.0;
  return t;
}

SkewDecomposition decompose_skew(const FpcIntrinsics& k_p) {
  k_p.validate();
  SkewDecomposition out;
  out.k_s = FpcIntrinsics{k_p.fx, k_p.fy, 0.0, k_p.px - k_p.s * k_p.py / k_p.fy, k_p.py};
  out.t_sp = Mat3::Identity();
  out.t_sp(0, 1) = k_p.s / k_p.fy;
  return out;
}

std::optional<Vec2> fpc_project(const FpcCamera& cam, const Vec3& world_point) {
  const Vec3 pc = cam.rotation * world_point + cam.translation;
  if (!(pc.z() > kMinProjectableDepth)) return std::nullopt;
  const Vec3 img = cam.intrinsics.as_matrix() * pc;
  return Vec2(img.x() / img.z(), img.y() / img.z());
}

FpcCamera with_intrinsics(const FpcCamera& cam, const FpcIntrinsics& k) {
  FpcCamera out = cam;
  out.intrinsics = k;
  return out;
}

// ---------------------------------------------------------------------------

void RpcCamera::validate() const {
  for (double scale : {lat_scale, lon_scale, height_scale, line_scale, samp_scale}) {
    if (scale == 0.0 || !std::isfinite(scale)) {
      throw InvalidArgument("RPC scale factors must be finite and nonzero");
    }
  }
  if (line_den[0] == 0.0 || samp_den[0] == 0.0) {
    throw InvalidArgument("RPC denominator vanishes at the normalized origin");
  }
}

void RpcCamera::normalize_denominators() {
  validate();
  auto rescale = [](RpcCoefficients& num, RpcCoefficients& den) {
    const double c = den[0];
    for (auto& v : num) v /= c;
    for (auto& v : den) v /= c;
    den[0] = 1.0;
  };
  rescale(line_num, line_den);
  rescale(samp_num, samp_den);
}

RpcCoefficients rpc_terms(double l, double p, double h) {
  return {1.0,       l,         p,         h,         l * p,     l * h,     p * h,
          l * l,     p * p,     h * h,     p * l * h, l * l * l, l * p * p, l * h * h,
          l * l * p, p * p * p, p * h * h, l * l * h, p * p * h, h * h * h};
}

namespace {

double dot20(const RpcCoefficients& c, const RpcCoefficients& t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < 20; ++i) acc += c[i] * t[i];
  return acc;
}

}  // namespace

RpcPixel rpc_project(const RpcCamera& rpc, double lat_deg, double lon_deg, double height_m) {
  const double p = (lat_deg - rpc.lat_off) / rpc.lat_scale;
  const double l = (lon_deg - rpc.lon_off) / rpc.lon_scale;
  const double h = (height_m - rpc.height_off) / rpc.height_scale;
  const auto terms = rpc_terms(l, p, h);

  const double line_den = dot20(rpc.line_den, terms);
  const double samp_den = dot20(rpc.samp_den, terms);
  if (std::abs(line_den) < 1e-10 || std::abs(samp_den) < 1e-10) {
    throw SingularError("RPC denominator is singular at the requested location");
  }

  RpcPixel out;
  out.sample = rpc.samp_off + rpc.samp_scale * dot20(rpc.samp_num, terms) / samp_den;
  out.line = rpc.line_off + rpc.line_scale * dot20(rpc.line_num, terms) / line_den;
  out.out_of_validity = std::abs(p) > 1.5 || std::abs(l) > 1.5 || std::abs(h) > 1.5;
  return out;
}

}  // namespace satrecon::camera
