// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "satrecon/camera.hpp"
#include "satrecon/depth.hpp"
#include "satrecon/error.hpp"
#include "satrecon/reference.hpp"
#include "test_support.hpp"

using namespace satrecon;
using namespace satrecon::depth;

namespace {

Mat34 canonical() {
  Mat34 p = Mat34::Zero();
  p.leftCols<3>().setIdentity();
  return p;
}

struct RandomRig {
  camera::FpcCamera cam;
  Vec3 point;
  double z_bar;
  double d;
};

// Looks roughly down at the origin from a few hundred meters up.
RandomRig random_rig(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> f(500, 20000), s(-300, 300), p(0, 4000), ang(-0.4, 0.4),
      h(200, 5000), xy(-100, 100), dz(-30, 30);
  RandomRig rig;
  rig.cam.intrinsics = {f(rng), f(rng), s(rng), p(rng), p(rng)};
  Eigen::Matrix3d flip;
  flip << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  rig.cam.rotation = flip * testkit::euler_rotation(ang(rng), ang(rng), 3 * ang(rng));
  const Vec3 center(xy(rng), xy(rng), h(rng));
  rig.cam.translation = -rig.cam.rotation * center;
  rig.point = Vec3(xy(rng), xy(rng), dz(rng));
  rig.z_bar = center.z() * (0.5 + std::uniform_real_distribution<double>(0, 1)(rng));
  rig.d = dz(rng) - 40.0;
  return rig;
}

}  // namespace

TEST(BuildReparam, RowFourAndNormalization) {
  const auto rp = build_reparam(canonical(), 1.0, -1.0);
  const Mat4 full = rp.p / rp.n_p;
  EXPECT_EQ(Eigen::RowVector4d(full.row(3)), Eigen::RowVector4d(0, 0, 1, 1));
  EXPECT_DOUBLE_EQ(rp.p.cwiseAbs().maxCoeff(), 1.0);
  EXPECT_DOUBLE_EQ(rp.p_inv.cwiseAbs().maxCoeff(), 1.0);
  EXPECT_LT((rp.projection3x4() - canonical()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BuildReparam, PlaneThroughCenterIsSingular) {
  EXPECT_THROW(build_reparam(canonical(), 1.0, 0.0), SingularError);
  std::mt19937_64 rng(61);
  for (int i = 0; i < 20; ++i) {
    const auto rig = random_rig(rng);
    EXPECT_THROW(build_reparam(rig.cam.projection_matrix(), rig.z_bar, rig.cam.center().z()), SingularError);
  }
}

TEST(BuildReparam, RejectsBadParameters) {
  EXPECT_THROW(build_reparam(canonical(), 0.0, -1.0), InvalidArgument);
  EXPECT_THROW(build_reparam(canonical(), std::nan(""), -1.0), InvalidArgument);
}

TEST(BuildReparam, InverseMatchesIndependentOracle) {
  std::mt19937_64 rng(67);
  for (int i = 0; i < 200; ++i) {
    const auto rig = random_rig(rng);
    const auto rp = build_reparam(rig.cam.projection_matrix(), rig.z_bar, rig.d);
    const Mat4 p = rp.p / rp.n_p;
    const Mat4 p_inv = rp.p_inv / rp.n_p_inv;
    EXPECT_LT((p * p_inv - Mat4::Identity()).cwiseAbs().maxCoeff(), 1e-9);
    const Mat4 oracle = testkit::gauss_jordan_inverse<4>(p);
    EXPECT_LT((p_inv - oracle).cwiseAbs().maxCoeff(), 1e-9 * oracle.cwiseAbs().maxCoeff());
    EXPECT_EQ(p(3, 0), 0.0);
    EXPECT_EQ(p(3, 1), 0.0);
    EXPECT_NEAR(p(3, 2), rig.z_bar, 1e-12 * rig.z_bar);
    EXPECT_NEAR(p(3, 3), -rig.z_bar * rig.d, 1e-12 * std::abs(rig.z_bar * rig.d));
  }
}

TEST(ForwardReparam, HandEvaluated) {
  const auto a = forward_reparam_depth(build_reparam(canonical(), 1.0, -1.0), {0, 0, 1});
  EXPECT_EQ(a.u, 0.0);
  EXPECT_EQ(a.v, 0.0);
  EXPECT_DOUBLE_EQ(a.m, 2.0);
  EXPECT_DOUBLE_EQ(a.z, 1.0);
  const auto b = forward_reparam_depth(build_reparam(canonical(), 5.0, -1.0), {0, 0, 5});
  EXPECT_DOUBLE_EQ(b.m, (5.0 * 5 + 5.0 * 1) / 5);
  const auto c = forward_reparam_depth(build_reparam(canonical(), 3.0, 2.0), {0.5, -0.25, 2.0});
  EXPECT_EQ(c.m, 0.0);
  EXPECT_DOUBLE_EQ(c.u, 0.25);
  EXPECT_DOUBLE_EQ(c.v, -0.125);
}

TEST(ForwardReparam, BehindCameraThrows) {
  EXPECT_THROW(forward_reparam_depth(build_reparam(canonical(), 1.0, -1.0), {0, 0, -1}), SingularError);
}

TEST(RecoverDepth, CanonicalInverse) {
  const auto rp = build_reparam(canonical(), 1.0, -1.0);
  EXPECT_DOUBLE_EQ(recover_depth(rp, 0, 0, 2), 1.0);
}

TEST(RecoverDepth, RoundTripOnRandomRigs) {
  std::mt19937_64 rng(71);
  for (int i = 0; i < 1000; ++i) {
    const auto rig = random_rig(rng);
    const auto rp = build_reparam(rig.cam.projection_matrix(), rig.z_bar, rig.d);
    const auto f = forward_reparam_depth(rp, rig.point);
    const double z_oracle = rig.cam.rotation.row(2).dot(rig.point) + rig.cam.translation.z();
    EXPECT_NEAR(f.z, z_oracle, 1e-9 * z_oracle);
    EXPECT_NEAR(recover_depth(rp, f.u, f.v, f.m), z_oracle, 1e-8 * z_oracle);
    EXPECT_LT((backproject(rp, f.u, f.v, f.m) - rig.point).norm(), 1e-6);
  }
}

TEST(RecoverDepth, NormalizationCancels) {
  std::mt19937_64 rng(73);
  const auto rig = random_rig(rng);
  auto rp = build_reparam(rig.cam.projection_matrix(), rig.z_bar, rig.d);
  const auto f = forward_reparam_depth(rp, rig.point);
  const double z0 = recover_depth(rp, f.u, f.v, f.m);
  for (double k : {1e-6, 0.37, 3.0, 1e5}) {
    auto scaled = rp;
    scaled.p_inv *= k;
    scaled.n_p_inv *= k;
    EXPECT_NEAR(recover_depth(scaled, f.u, f.v, f.m), z0, 1e-12 * z0);
  }
}

TEST(RecoverDepth, PointAtInfinity) {
  const auto rp = build_reparam(canonical(), 1.0, -1.0);
  // Row 4 of the inverse is (0, 0, 1, -1) / n up to normalization; it vanishes when m = 1.
  EXPECT_THROW(recover_depth(rp, 0, 0, 1), SingularError);
}

TEST(RecoverDepthMap, AllNodata) {
  const auto rp = build_reparam(canonical(), 1.0, -1.0);
  const DepthMap dm{Raster(4, 3, 1), DepthKind::Reparameterized, "c"};
  const auto out = recover_depth_map(dm, rp);
  EXPECT_EQ(out.kind, DepthKind::Metric);
  EXPECT_EQ(out.camera_id, "c");
  for (float v : out.raster.samples()) EXPECT_TRUE(std::isnan(v));
  EXPECT_THROW(recover_depth_map(out, rp), InvalidArgument);
}

TEST(RecoverDepthMap, ConstantMFollowsClosedForm) {
  Mat34 p = Mat34::Zero();
  p << 100, 0, 20, 5, 0, 100, 10, -3, 0.01, 0.02, 1, 10;
  const auto rp = build_reparam(p, 12.0, -4.0);
  const DepthMap dm{Raster(16, 9, 1, 7.5f), DepthKind::Reparameterized, ""};
  const auto out = recover_depth_map(dm, rp);
  const Mat4 inv = testkit::gauss_jordan_inverse<4>(Mat4(rp.p / rp.n_p));
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 16; ++x) {
      const double expected = 1.0 / inv.row(3).dot(Vec4(x, y, 1, 7.5));
      EXPECT_NEAR(out.raster.at(x, y), expected, 1e-6 * std::abs(expected));
    }
  }
}

TEST(RecoverDepthMap, KnownPlaneMatchesRayIntersection) {
  std::mt19937_64 rng(79);
  const auto rig = random_rig(rng);
  const double plane_h = 7.0;
  const double z_bar = rig.cam.center().z() - plane_h;
  const double d = -20.0;
  const auto rp = build_reparam(rig.cam.projection_matrix(), z_bar, d);
  const Mat34 p3 = rig.cam.projection_matrix();
  const Eigen::Matrix3d m_inv = testkit::gauss_jordan_inverse<3>(Eigen::Matrix3d(p3.leftCols<3>()));
  const Vec3 c = rig.cam.center();

  DepthMap dm{Raster(32, 32, 1, 0.0f), DepthKind::Reparameterized, ""};
  std::vector<double> truth(32 * 32);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) {
      const double u = rig.cam.intrinsics.px + 20.0 * (x - 16);
      const double v = rig.cam.intrinsics.py + 20.0 * (y - 16);
      // Ray-plane intersection against z = plane_h.
      const Vec3 dir = m_inv * Vec3(u, v, 1);
      const Vec3 hit = c + dir * ((plane_h - c.z()) / dir.z());
      const double z = p3.row(2).dot(hit.homogeneous());
      truth[y * 32 + x] = z;
      dm.raster.at(x, y) = static_cast<float>(z_bar * (plane_h - d) / z);
    }
  }
  // Shift the pixel grid so that (x, y) addresses (u, v) directly.
  Eigen::Matrix3d a;
  a << 20, 0, rig.cam.intrinsics.px - 320, 0, 20, rig.cam.intrinsics.py - 320, 0, 0, 1;
  const auto rp_px = build_reparam(testkit::gauss_jordan_inverse<3>(a) * p3, z_bar, d);
  const auto out = recover_depth_map(dm, rp_px);
  for (int i = 0; i < 32 * 32; ++i) EXPECT_NEAR(out.raster.samples()[i], truth[i], 1e-6 * truth[i]);
  (void)rp;
}

TEST(RecoverDepthMap, MatchesReference) {
  std::mt19937_64 rng(83);
  const auto rig = random_rig(rng);
  const auto rp = build_reparam(rig.cam.projection_matrix(), rig.z_bar, rig.d);
  DepthMap dm{Raster(40, 30, 1, 0.0f), DepthKind::Reparameterized, ""};
  std::uniform_real_distribution<float> m(0.5f, 3.0f);
  for (auto& v : dm.raster.samples()) v = m(rng);
  dm.raster.at(3, 3) = kNoData;
  const auto a = recover_depth_map(dm, rp);
  const auto b = reference::recover_depth_map(dm, rp);
  for (std::size_t i = 0; i < a.raster.size(); ++i) {
    const float x = a.raster.samples()[i], y = b.raster.samples()[i];
    if (std::isnan(y)) {
      EXPECT_TRUE(std::isnan(x));
    } else {
      EXPECT_NEAR(x, y, 1e-6 * std::abs(y));
    }
  }
}

TEST(SkewCorrectDepth, IdentityUnchanged) {
  std::mt19937_64 rng(89);
  DepthMap dm{Raster(10, 10, 1, 0.0f), DepthKind::Metric, "a"};
  std::uniform_real_distribution<float> z(100, 200);
  for (auto& v : dm.raster.samples()) v = z(rng);
  const auto out = skew_correct_depth_map(dm, Eigen::Matrix3d::Identity());
  for (std::size_t i = 0; i < out.raster.size(); ++i) EXPECT_EQ(out.raster.samples()[i], dm.raster.samples()[i]);
}

TEST(SkewCorrectDepth, ShearLeavesNodataBand) {
  DepthMap dm{Raster(20, 20, 1, 5.0f), DepthKind::Metric, ""};
  Eigen::Matrix3d t = Eigen::Matrix3d::Identity();
  t(0, 1) = 0.5;
  const auto out = skew_correct_depth_map(dm, t);
  EXPECT_TRUE(std::isnan(out.raster.at(19, 19)));
  EXPECT_EQ(out.raster.at(0, 0), 5.0f);
  EXPECT_EQ(out.raster.at(0, 19), 5.0f);
}

TEST(SkewCorrectReparam, ReprojectsThroughSkewFreeCamera) {
  std::mt19937_64 rng(97);
  for (int i = 0; i < 50; ++i) {
    const auto rig = random_rig(rng);
    const auto rp = build_reparam(rig.cam.projection_matrix(), rig.z_bar, rig.d);
    const auto dec = camera::decompose_skew(rig.cam.intrinsics);
    const auto rs = skew_correct_reparam(rp, dec.t_sp);
    const auto expected = build_reparam(camera::with_intrinsics(rig.cam, dec.k_s).projection_matrix(), rig.z_bar,
                                        rig.d);
    const auto a = forward_reparam_depth(rs, rig.point);
    const auto b = forward_reparam_depth(expected, rig.point);
    EXPECT_NEAR(a.u, b.u, 1e-7 * (1 + std::abs(b.u)));
    EXPECT_NEAR(a.v, b.v, 1e-7 * (1 + std::abs(b.v)));
    EXPECT_NEAR(a.m, b.m, 1e-10 * (1 + std::abs(b.m)));
    EXPECT_NEAR(recover_depth(rs, a.u, a.v, a.m), b.z, 1e-8 * b.z);
  }
}

TEST(Fusion, ConsistentViewsKeepPoints) {
  // Two cameras over a flat plane z = 0 agree everywhere.
  std::vector<View> views;
  for (double cx : {-50.0, 50.0}) {
    camera::FpcCamera cam;
    cam.intrinsics = {100, 100, 0, 16, 16};
    cam.rotation << 1, 0, 0, 0, -1, 0, 0, 0, -1;
    cam.translation = -cam.rotation * Vec3(cx, 0, 1000);
    const auto rp = build_reparam(cam.projection_matrix(), 1000, -10);
    DepthMap dm{Raster(32, 32, 1, 0.0f), DepthKind::Metric, ""};
    const Eigen::Matrix3d m_inv = testkit::gauss_jordan_inverse<3>(Eigen::Matrix3d(cam.projection_matrix().leftCols<3>()));
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 32; ++x) {
        const Vec3 dir = m_inv * Vec3(x, y, 1);
        const Vec3 hit = cam.center() + dir * (-cam.center().z() / dir.z());
        dm.raster.at(x, y) = static_cast<float>(cam.projection_matrix().row(2).dot(hit.homogeneous()));
      }
    }
    views.push_back({dm, rp});
  }
  const auto pts = fuse_depth_maps(views, {1, 0.1});
  EXPECT_GT(pts.size(), 1000u);
  for (const auto& p : pts) EXPECT_NEAR(p.z(), 0.0, 1e-3);
  // A view that disagrees by 5 m is rejected.
  for (auto& v : views[1].depth.raster.samples()) v += 5.0f;
  EXPECT_TRUE(fuse_depth_maps(views, {1, 0.1}).empty());
  EXPECT_THROW(fuse_depth_maps(views, {-1, 0.1}), InvalidArgument);
  EXPECT_THROW(fuse_depth_maps(views, {1, 0.0}), InvalidArgument);
}
