// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "satrecon/camera.hpp"
#include "satrecon/depth.hpp"
#include "satrecon/eval.hpp"
#include "satrecon/mesh.hpp"
#include "satrecon/raster.hpp"

namespace satrecon::synth {

struct SynthConfig {
  int boxes = 20;
  int cameras = 4;
  int image_size = 512;
  double extent = 80.0;        ///< side of the evaluated square, meters
  double cell = 0.5;           ///< ground-truth grid cell, meters
  double ground_height = 20.0;
  double standoff = 3000.0;    ///< camera distance to the scene center, meters
  double off_nadir_deg = 10.0;
  double origin_e = 354000.0;  ///< UTM easting of the grid's south-west corner
  double origin_n = 6182000.0;
  int zone = 21;
  utm::Hemisphere hemisphere = utm::Hemisphere::South;

  void validate() const;
};

/// Axis-aligned box standing on the ground; footprint in world coordinates.
struct Box {
  double x0, y0, x1, y1;
  double top;
};

struct RenderedView {
  std::string id;
  camera::FpcCamera camera;        ///< skewed calibration
  Raster image;                    ///< 1 channel, shaded radiance
  depth::DepthMap depth;           ///< kind m, rendered under `camera`
  depth::ReparamProjection projection;
};

struct SyntheticScene {
  SynthConfig config;
  std::uint64_t seed = 0;
  std::vector<Box> boxes;
  TriangleMesh mesh;
  eval::HeightGrid ground_truth;
  std::vector<RenderedView> views;
};

/// Deterministic for a fixed (config, seed).
SyntheticScene generate_synthetic_scene(const SynthConfig& config, std::uint64_t seed);

/// Nearest ray hit against the ground plane and boxes; returns the ray
/// parameter and surface normal.
struct Hit {
  double t;
  Eigen::Vector3d normal;
};
std::optional<Hit> cast_ray(const SyntheticScene& scene, const Eigen::Vector3d& origin,
                            const Eigen::Vector3d& dir);

/// Writes mesh.ply, gt.hgrid, cam_<k>.json, img_<k>.srtk, depth_<k>.srtk (with
/// sidecars) and scene.json into `dir`, creating it if needed.
void write_scene(const SyntheticScene& scene, const std::filesystem::path& dir);

}  // namespace satrecon::synth
