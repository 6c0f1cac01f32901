// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#include <cstring>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "satrecon/cli.hpp"
#include "satrecon/depth.hpp"
#include "satrecon/documents.hpp"
#include "satrecon/eval.hpp"
#include "satrecon/image_formats.hpp"
#include "satrecon/mesh.hpp"
#include "satrecon/preprocess.hpp"
#include "satrecon/raster_io.hpp"
#include "satrecon/synth.hpp"
#include "test_support.hpp"

using namespace satrecon;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string s(const std::filesystem::path& p) { return p.string(); }

bool same_bits(const Raster& a, const Raster& b) {
  return a.size() == b.size() && a.width() == b.width() &&
         std::memcmp(a.samples().data(), b.samples().data(), a.size() * sizeof(float)) == 0;
}

class CliScene : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testkit::TempDir("cli");
    const auto r = run({"synth", "--out-dir", s(dir_->path()), "--seed", "4", "--boxes", "6", "--cameras", "2",
                        "--size", "128", "--extent", "40"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static std::filesystem::path at(const std::string& name) { return *dir_ / name; }
  static testkit::TempDir* dir_;
};

testkit::TempDir* CliScene::dir_ = nullptr;

}  // namespace

TEST(Cli, UsageErrors) {
  auto r = run({});
  EXPECT_EQ(r.code, 2);
  r = run({"frobnicate"});
  EXPECT_EQ(r.code, 2);
  r = run({"tonemap", "--image", "a.srtk", "--out", "b.srtk", "--bogus"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("tonemap"), std::string::npos);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  r = run({"tonemap", "--image", "a.srtk"});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, HelpIsSuccess) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("evaluate"), std::string::npos);
}

TEST(Cli, DomainErrorIsOne) {
  testkit::TempDir dir("clid");
  const auto r = run({"tonemap", "--image", s(dir / "missing.srtk"), "--out", s(dir / "o.srtk")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST_F(CliScene, DepthRecoverRoundTripsFixture) {
  const auto r = run({"depth-recover", "--depth", s(at("depth_0.srtk")), "--out", s(at("z0.srtk"))});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = docs::load_depth(at("depth_0.srtk"));
  const auto z = docs::load_depth(at("z0.srtk"));
  EXPECT_EQ(z.map.kind, depth::DepthKind::Metric);
  // Forward oracle: regenerate the scene and compare with the ray-cast depth.
  synth::SynthConfig cfg;
  cfg.boxes = 6;
  cfg.cameras = 2;
  cfg.image_size = 128;
  cfg.extent = 40;
  const auto scene = synth::generate_synthetic_scene(cfg, 4);
  const auto& view = scene.views[0];
  const Eigen::Matrix3d kinv = camera::fpc_invert(view.camera.intrinsics);
  int checked = 0;
  for (int v = 0; v < 128; v += 3) {
    for (int u = 0; u < 128; u += 3) {
      const Eigen::Vector3d dir = view.camera.rotation.transpose() * (kinv * Eigen::Vector3d(u, v, 1));
      const auto hit = synth::cast_ray(scene, view.camera.center(), dir);
      if (!hit) continue;
      EXPECT_NEAR(z.map.raster.at(u, v), hit->t, 1e-6 * hit->t);
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000);
  // Thin adapter: identical to the library call.
  const auto lib = depth::recover_depth_map(m.map, *m.projection);
  EXPECT_TRUE(same_bits(lib.raster, z.map.raster));
}

TEST_F(CliScene, DepthRecoverWithExplicitProjection) {
  const auto proj = docs::read_json(docs::sidecar_path(at("depth_1.srtk")));
  docs::write_json(proj, at("proj1.json"));
  save_raster(docs::load_depth(at("depth_1.srtk")).map.raster, at("bare_m.srtk"));
  docs::write_json({{"kind", "m"}, {"camera_id", "x"}}, docs::sidecar_path(at("bare_m.srtk")));
  auto r = run({"depth-recover", "--depth", s(at("bare_m.srtk")), "--out", s(at("z1.srtk"))});
  EXPECT_EQ(r.code, 1);
  r = run({"depth-recover", "--depth", s(at("bare_m.srtk")), "--proj", s(at("proj1.json")), "--out",
           s(at("z1.srtk"))});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(docs::load_depth(at("z1.srtk")).map.kind, depth::DepthKind::Metric);
}

TEST_F(CliScene, SkewCorrectSkewFreeIsIdentity) {
  auto cam = docs::load_camera(at("cam_0.json"));
  cam.fpc->intrinsics.s = 0.0;
  docs::save_camera(cam, at("noskew_cam.json"));
  const auto r = run({"skew-correct", "--camera", s(at("noskew_cam.json")), "--image", s(at("img_0.srtk"))});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("skew = 0"), std::string::npos);
  EXPECT_TRUE(same_bits(load_raster(at("img_0.srtk")), load_raster(at("img_0.noskew.srtk"))));
}

TEST_F(CliScene, SkewCorrectWritesSkewFreeCameraAndDepth) {
  const auto r = run({"skew-correct", "--camera", s(at("cam_1.json")), "--depth", s(at("depth_1.srtk")),
                      "--out-camera", s(at("cam1s.json")), "--out-depth", s(at("d1s.srtk"))});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.err.find("skew = 0\n"), std::string::npos);
  const auto cam = docs::load_camera(at("cam1s.json"));
  EXPECT_EQ(cam.fpc->intrinsics.s, 0.0);
  const auto d = docs::load_depth(at("d1s.srtk"));
  ASSERT_TRUE(d.projection);
  const auto expected = depth::build_reparam(cam.fpc->projection_matrix(), d.projection->z_bar, d.projection->d);
  EXPECT_LT((d.projection->projection3x4() - expected.projection3x4()).cwiseAbs().maxCoeff(),
            1e-9 * expected.projection3x4().cwiseAbs().maxCoeff());
}

TEST_F(CliScene, EvaluateHappyPathMatchesLibrary) {
  const auto r = run({"evaluate", "--recon", s(at("mesh.ply")), "--gt", s(at("gt.hgrid")), "--cell", "0.5",
                      "--out", s(at("report.json")), "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = docs::read_json(at("report.json"));
  const auto gt = docs::load_height_grid(at("gt.hgrid"));
  const auto pts = eval::poisson_disk_sample(load_ply(at("mesh.ply")), 0.25, 3);
  const auto grid = eval::fill_holes(eval::rasterize_height(pts, gt.spec));
  const auto lib = eval::compute_metrics(grid, gt);
  EXPECT_EQ(doc["completeness"].get<double>(), lib.completeness);
  EXPECT_EQ(doc["median_error"].get<double>(), lib.median_error);
  EXPECT_GT(lib.completeness, 95.0);
}

TEST_F(CliScene, EvaluateRejectsMismatchedCell) {
  const auto r = run({"evaluate", "--recon", s(at("mesh.ply")), "--gt", s(at("gt.hgrid")), "--cell", "1.0"});
  EXPECT_EQ(r.code, 1);
}

TEST_F(CliScene, ConfigFileWithFlagOverride) {
  {
    std::ofstream cfg(at("run.toml"));
    cfg << "[evaluate]\nrecon = \"" << s(at("mesh.ply")) << "\"\ngt = \"" << s(at("gt.hgrid"))
        << "\"\nthreshold = 0.0001\nsampling = \"vertex\"\nno-fill = true\n";
  }
  auto r = run({"--config", s(at("run.toml")), "evaluate"});
  ASSERT_EQ(r.code, 0) << r.err;
  const double cp_tight = docs::Json::parse(r.out)["completeness"].get<double>();
  r = run({"--config", s(at("run.toml")), "evaluate", "--threshold", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = docs::Json::parse(r.out);
  EXPECT_EQ(doc["completeness_threshold"].get<double>(), 5.0);
  EXPECT_GE(doc["completeness"].get<double>(), cp_tight);
}

TEST_F(CliScene, TonemapMatchesLibrary) {
  const auto r = run({"tonemap", "--image", s(at("img_0.srtk")), "--out", s(at("tm.png")), "--percentiles", "1,99"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lib = preprocess::tonemap(load_raster(at("img_0.srtk")), 1, 99);
  EXPECT_TRUE(same_bits(load_png(at("tm.png")), lib));
}

TEST_F(CliScene, SampleMeshDeterministic) {
  auto r = run({"sample-mesh", "--mesh", s(at("mesh.ply")), "--radius", "1", "--seed", "9", "--out", s(at("a.ply"))});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run({"sample-mesh", "--mesh", s(at("mesh.ply")), "--radius", "1", "--seed", "9", "--out", s(at("b.ply"))});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(testkit::read_bytes(at("a.ply")), testkit::read_bytes(at("b.ply")));
  EXPECT_EQ(load_ply(at("a.ply")).vertices, eval::poisson_disk_sample(load_ply(at("mesh.ply")), 1.0, 9));
}

TEST_F(CliScene, FuseAndConvert) {
  for (int k : {0, 1}) {
    const auto r = run({"depth-recover", "--depth", s(at("depth_" + std::to_string(k) + ".srtk")), "--out",
                        s(at("fz" + std::to_string(k) + ".srtk"))});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  auto r = run({"fuse", "--depth", s(at("fz0.srtk")), "--depth", s(at("fz1.srtk")), "--min-views", "1", "--out",
                s(at("cloud.ply"))});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GT(load_ply(at("cloud.ply")).vertices.size(), 5000u);
  r = run({"convert", "--in", s(at("cloud.ply")), "--out", s(at("cloud.hgrid")), "--cell", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GT(docs::load_height_grid(at("cloud.hgrid")).valid_count(), 1000u);
  r = run({"convert", "--in", s(at("img_0.srtk")), "--out", s(at("img0.pfm"))});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(same_bits(load_pfm(at("img0.pfm")), load_raster(at("img_0.srtk"))));
  r = run({"convert", "--in", s(at("img_0.srtk")), "--out", s(at("img0.xyz"))});
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, PansharpenMatchesLibrary) {
  testkit::TempDir dir("clip");
  Raster pan(8, 8, 1, 0.0f), msi(2, 2, 3, 0.0f);
  for (int i = 0; i < 64; ++i) pan.samples()[i] = static_cast<float>(i + 10);
  for (int i = 0; i < 12; ++i) msi.samples()[i] = static_cast<float>(3 * i + 1);
  save_raster(pan, dir / "pan.srtk");
  save_raster(msi, dir / "msi.srtk");
  const auto r = run({"pansharpen", "--pan", s(dir / "pan.srtk"), "--msi", s(dir / "msi.srtk"), "--weights",
                      "1,2,1", "--out", s(dir / "out.srtk")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(same_bits(load_raster(dir / "out.srtk"), preprocess::pansharpen_brovey(pan, msi, {1, 2, 1})));
}

TEST(Cli, AoiExtractFiltersCloudyScenes) {
  testkit::TempDir dir("clia");
  const int zone = 33;
  const double cm = utm::central_meridian(zone);
  camera::RpcCamera rpc;
  rpc.samp_num[1] = 1.0;
  rpc.line_num[2] = -1.0;
  rpc.samp_den[0] = rpc.line_den[0] = 1.0;
  rpc.lat_off = 45.0;
  rpc.lon_off = cm;
  rpc.lat_scale = rpc.lon_scale = 0.01;
  rpc.samp_off = rpc.line_off = 500;
  rpc.samp_scale = rpc.line_scale = 1000;
  for (const auto& [id, cover] : std::vector<std::pair<std::string, double>>{{"clear", 0.1}, {"cloudy", 0.7}}) {
    docs::save_scene({{id, cover, "2016-01-01", preprocess::SensorKind::Panchromatic}, rpc}, dir / (id + ".json"));
    save_raster(Raster(1000, 1000, 1, 1.0f), dir / (id + ".srtk"));
  }
  const auto c = utm::geodetic_to_utm(45.0, cm, zone, utm::Hemisphere::North);
  const auto r = run({"aoi-extract", "--image", s(dir / "clear.srtk"), "--meta", s(dir / "clear.json"), "--image",
                      s(dir / "cloudy.srtk"), "--meta", s(dir / "cloudy.json"), "--aoi",
                      std::to_string(c.easting - 50), std::to_string(c.northing - 50), std::to_string(c.easting + 50),
                      std::to_string(c.northing + 50), "--zone", "33", "--out-dir", s(dir / "out")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "clear_aoi.srtk"));
  EXPECT_FALSE(std::filesystem::exists(dir / "out" / "cloudy_aoi.srtk"));
  const auto crop = load_raster(dir / "out" / "clear_aoi.srtk");
  EXPECT_GT(crop.width(), 5);
  EXPECT_LT(crop.width(), 200);
}
