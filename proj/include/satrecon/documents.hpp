// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#pragma once

// JSON documents exchanged with external tools: camera files, scene metadata,
// depth-map and height-grid sidecars, evaluation reports. Field names are
// listed in docs/formats.md.

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "satrecon/camera.hpp"
#include "satrecon/depth.hpp"
#include "satrecon/eval.hpp"
#include "satrecon/preprocess.hpp"

namespace satrecon::docs {

using Json = nlohmann::json;

Json read_json(const std::filesystem::path& path);
void write_json(const Json& doc, const std::filesystem::path& path);

/// `<path>.json`, the sidecar location for rasters and grids.
std::filesystem::path sidecar_path(const std::filesystem::path& path);

// Camera file: {"id": ..., "fpc": {...}, "rpc": {...}}, either model optional.
struct CameraFile {
  std::string id;
  std::optional<camera::FpcCamera> fpc;
  std::optional<camera::RpcCamera> rpc;
};

Json fpc_to_json(const camera::FpcCamera& cam);
camera::FpcCamera fpc_from_json(const Json& j);
Json rpc_to_json(const camera::RpcCamera& rpc);
/// Validates and normalizes the denominators' constant terms to 1.
camera::RpcCamera rpc_from_json(const Json& j);

Json camera_to_json(const CameraFile& cam);
CameraFile camera_from_json(const Json& j);
CameraFile load_camera(const std::filesystem::path& path);
void save_camera(const CameraFile& cam, const std::filesystem::path& path);

// Scene metadata sidecar: {"id", "cloud_cover", "sensor", "timestamp", "rpc"}.
struct SceneFile {
  preprocess::SceneMetadata meta;
  std::optional<camera::RpcCamera> rpc;
};

SceneFile load_scene(const std::filesystem::path& path);
void save_scene(const SceneFile& scene, const std::filesystem::path& path);

// Depth map = raster file + sidecar
// {"kind": "m"|"z", "camera_id", "z_bar", "d", "n_p", "n_p_inv", "P"[16], "P_inv"[16]}.
struct DepthFile {
  depth::DepthMap map;
  std::optional<depth::ReparamProjection> projection;
};

Json reparam_to_json(const depth::ReparamProjection& rp);
depth::ReparamProjection reparam_from_json(const Json& j);
DepthFile load_depth(const std::filesystem::path& raster_path,
                     const std::optional<std::filesystem::path>& sidecar = std::nullopt);
void save_depth(const DepthFile& depth, const std::filesystem::path& raster_path);

// Height grid = 1-channel raster (nx by ny, row j = northing index) + sidecar
// {"origin_e", "origin_n", "cell", "zone", "hemisphere"}.
eval::HeightGrid load_height_grid(const std::filesystem::path& path);
void save_height_grid(const eval::HeightGrid& grid, const std::filesystem::path& path);

Json report_to_json(const eval::EvalReport& report, double threshold);

}  // namespace satrecon::docs
