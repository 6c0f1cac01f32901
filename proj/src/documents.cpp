// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#include "satrecon/documents.hpp"

#include <cmath>
#include <fstream>

#include "satrecon/error.hpp"
#include "satrecon/raster_io.hpp"

namespace satrecon::docs {

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json(const Json& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

namespace {

// Field access with a uniform error type.
template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw FormatError(std::string("field '") + key + "' has the wrong type");
  }
}

template <std::size_t N>
std::array<double, N> fixed_array(const Json& j, const char* key) {
  const auto v = field<std::vector<double>>(j, key);
  if (v.size() != N) {
    throw FormatError(std::string("field '") + key + "' must hold " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

template <typename Derived>
std::vector<double> row_major(const Eigen::MatrixBase<Derived>& m) {
  std::vector<double> out;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

depth::Mat4 mat4_from(const Json& j, const char* key) {
  const auto a = fixed_array<16>(j, key);
  depth::Mat4 m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m(r, c) = a[static_cast<std::size_t>(4 * r + c)];
  return m;
}

template <typename Fn>
auto rethrow_invalid(Fn&& fn) {
  try {
    return fn();
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
}

}  // namespace

Json fpc_to_json(const camera::FpcCamera& cam) {
  const auto& k = cam.intrinsics;
  return Json{{"fx", k.fx}, {"fy", k.fy}, {"s", k.s}, {"px", k.px}, {"py", k.py},
              {"R", row_major(cam.rotation)}, {"t", row_major(cam.translation.transpose())}};
}

camera::FpcCamera fpc_from_json(const Json& j) {
  camera::FpcCamera cam;
  cam.intrinsics = {field<double>(j, "fx"), field<double>(j, "fy"), field<double>(j, "s"),
                    field<double>(j, "px"), field<double>(j, "py")};
  const auto r = fixed_array<9>(j, "R");
  const auto t = fixed_array<3>(j, "t");
  for (int i = 0; i < 3; ++i) {
    for (int c = 0; c < 3; ++c) cam.rotation(i, c) = r[static_cast<std::size_t>(3 * i + c)];
    cam.translation(i) = t[static_cast<std::size_t>(i)];
  }
  rethrow_invalid([&] { cam.validate(); return 0; });
  return cam;
}

Json rpc_to_json(const camera::RpcCamera& rpc) {
  return Json{{"line_num", rpc.line_num},
              {"line_den", rpc.line_den},
              {"samp_num", rpc.samp_num},
              {"samp_den", rpc.samp_den},
              {"offsets",
               {{"lat", rpc.lat_off}, {"lon", rpc.lon_off}, {"height", rpc.height_off},
                {"line", rpc.line_off}, {"samp", rpc.samp_off}}},
              {"scales",
               {{"lat", rpc.lat_scale}, {"lon", rpc.lon_scale}, {"height", rpc.height_scale},
                {"line", rpc.line_scale}, {"samp", rpc.samp_scale}}}};
}

camera::RpcCamera rpc_from_json(const Json& j) {
  camera::RpcCamera rpc;
  rpc.line_num = fixed_array<20>(j, "line_num");
  rpc.line_den = fixed_array<20>(j, "line_den");
  rpc.samp_num = fixed_array<20>(j, "samp_num");
  rpc.samp_den = fixed_array<20>(j, "samp_den");
  const auto off = field<Json>(j, "offsets");
  const auto sc = field<Json>(j, "scales");
  rpc.lat_off = field<double>(off, "lat");
  rpc.lon_off = field<double>(off, "lon");
  rpc.height_off = field<double>(off, "height");
  rpc.line_off = field<double>(off, "line");
  rpc.samp_off = field<double>(off, "samp");
  rpc.lat_scale = field<double>(sc, "lat");
  rpc.lon_scale = field<double>(sc, "lon");
  rpc.height_scale = field<double>(sc, "height");
  rpc.line_scale = field<double>(sc, "line");
  rpc.samp_scale = field<double>(sc, "samp");
  rethrow_invalid([&] { rpc.normalize_denominators(); return 0; });
  return rpc;
}

Json camera_to_json(const CameraFile& cam) {
  Json j = Json::object();
  if (!cam.id.empty()) j["id"] = cam.id;
  if (cam.fpc) j["fpc"] = fpc_to_json(*cam.fpc);
  if (cam.rpc) j["rpc"] = rpc_to_json(*cam.rpc);
  return j;
}

CameraFile camera_from_json(const Json& j) {
  if (!j.is_object()) throw FormatError("camera document must be an object");
  CameraFile cam;
  if (j.contains("id")) cam.id = field<std::string>(j, "id");
  if (j.contains("fpc")) cam.fpc = fpc_from_json(j.at("fpc"));
  if (j.contains("rpc")) cam.rpc = rpc_from_json(j.at("rpc"));
  if (!cam.fpc && !cam.rpc) throw FormatError("camera document has neither 'fpc' nor 'rpc'");
  return cam;
}

CameraFile load_camera(const std::filesystem::path& path) { return camera_from_json(read_json(path)); }

void save_camera(const CameraFile& cam, const std::filesystem::path& path) {
  write_json(camera_to_json(cam), path);
}

// ---------------------------------------------------------------------------

SceneFile load_scene(const std::filesystem::path& path) {
  const Json j = read_json(path);
  SceneFile s;
  s.meta.id = j.contains("id") ? field<std::string>(j, "id") : path.stem().string();
  s.meta.cloud_cover = field<double>(j, "cloud_cover");
  s.meta.timestamp = j.contains("timestamp") ? field<std::string>(j, "timestamp") : "";
  const auto sensor = field<std::string>(j, "sensor");
  if (sensor == "panchromatic") s.meta.sensor = preprocess::SensorKind::Panchromatic;
  else if (sensor == "multispectral") s.meta.sensor = preprocess::SensorKind::Multispectral;
  else throw FormatError("unknown sensor kind '" + sensor + "'");
  rethrow_invalid([&] { s.meta.validate(); return 0; });
  if (j.contains("rpc")) s.rpc = rpc_from_json(j.at("rpc"));
  return s;
}

void save_scene(const SceneFile& scene, const std::filesystem::path& path) {
  Json j{{"id", scene.meta.id},
         {"cloud_cover", scene.meta.cloud_cover},
         {"timestamp", scene.meta.timestamp},
         {"sensor", scene.meta.sensor == preprocess::SensorKind::Panchromatic ? "panchromatic"
                                                                             : "multispectral"}};
  if (scene.rpc) j["rpc"] = rpc_to_json(*scene.rpc);
  write_json(j, path);
}

// ---------------------------------------------------------------------------

Json reparam_to_json(const depth::ReparamProjection& rp) {
  return Json{{"z_bar", rp.z_bar}, {"d", rp.d},           {"n_p", rp.n_p},
              {"n_p_inv", rp.n_p_inv}, {"P", row_major(rp.p)}, {"P_inv", row_major(rp.p_inv)}};
}

depth::ReparamProjection reparam_from_json(const Json& j) {
  depth::ReparamProjection rp;
  rp.z_bar = field<double>(j, "z_bar");
  rp.d = field<double>(j, "d");
  rp.n_p = field<double>(j, "n_p");
  rp.n_p_inv = field<double>(j, "n_p_inv");
  rp.p = mat4_from(j, "P");
  rp.p_inv = mat4_from(j, "P_inv");
  if (!(rp.z_bar > 0.0) || !(rp.n_p != 0.0) || !(rp.n_p_inv != 0.0) || !rp.p.allFinite() ||
      !rp.p_inv.allFinite()) {
    throw FormatError("reparameterized projection has invalid values");
  }
  return rp;
}

DepthFile load_depth(const std::filesystem::path& raster_path,
                     const std::optional<std::filesystem::path>& sidecar) {
  DepthFile out;
  out.map.raster = load_raster(raster_path);
  if (out.map.raster.channels() != 1) throw FormatError("depth map must have one channel");
  const auto side = sidecar.value_or(sidecar_path(raster_path));
  if (!std::filesystem::exists(side)) throw IoError("depth sidecar '" + side.string() + "' not found");
  const Json j = read_json(side);
  const auto kind = field<std::string>(j, "kind");
  if (kind == "m") out.map.kind = depth::DepthKind::Reparameterized;
  else if (kind == "z") out.map.kind = depth::DepthKind::Metric;
  else throw FormatError("depth kind must be 'm' or 'z'");
  out.map.camera_id = j.contains("camera_id") ? field<std::string>(j, "camera_id") : "";
  if (j.contains("P")) out.projection = reparam_from_json(j);
  return out;
}

void save_depth(const DepthFile& depth, const std::filesystem::path& raster_path) {
  save_raster(depth.map.raster, raster_path);
  Json j = depth.projection ? reparam_to_json(*depth.projection) : Json::object();
  j["kind"] = depth.map.kind == depth::DepthKind::Reparameterized ? "m" : "z";
  j["camera_id"] = depth.map.camera_id;
  write_json(j, sidecar_path(raster_path));
}

// ---------------------------------------------------------------------------

eval::HeightGrid load_height_grid(const std::filesystem::path& path) {
  const Raster r = load_raster(path);
  if (r.channels() != 1) throw FormatError("height grid raster must have one channel");
  const Json j = read_json(sidecar_path(path));
  eval::HeightGrid g;
  g.spec = {field<double>(j, "origin_e"), field<double>(j, "origin_n"), field<double>(j, "cell"),
            r.width(), r.height()};
  g.zone = j.contains("zone") ? field<int>(j, "zone") : 0;
  const auto hemi = j.contains("hemisphere") ? field<std::string>(j, "hemisphere") : "N";
  if (hemi != "N" && hemi != "S") throw FormatError("hemisphere must be 'N' or 'S'");
  g.hemisphere = hemi == "S" ? utm::Hemisphere::South : utm::Hemisphere::North;
  g.heights.assign(r.samples().begin(), r.samples().end());
  for (auto& h : g.heights)
    if (r.is_nodata(h)) h = std::numeric_limits<float>::quiet_NaN();
  rethrow_invalid([&] { g.validate(); return 0; });
  return g;
}

void save_height_grid(const eval::HeightGrid& grid, const std::filesystem::path& path) {
  grid.validate();
  save_raster(Raster(grid.spec.nx, grid.spec.ny, 1, grid.heights), path);
  write_json(Json{{"origin_e", grid.spec.origin_e},
                  {"origin_n", grid.spec.origin_n},
                  {"cell", grid.spec.cell},
                  {"zone", grid.zone},
                  {"hemisphere", grid.hemisphere == utm::Hemisphere::South ? "S" : "N"}},
             sidecar_path(path));
}

Json report_to_json(const eval::EvalReport& report, double threshold) {
  Json me = std::isnan(report.median_error) ? Json(nullptr) : Json(report.median_error);
  return Json{{"completeness", report.completeness},
              {"median_error", me},
              {"offset", {{"dx", report.offset.dx}, {"dy", report.offset.dy}, {"dz", report.offset.dz}}},
              {"evaluated_cells", report.evaluated_cells},
              {"gt_cells", report.gt_cells},
              {"completeness_threshold", threshold},
              {"missing_recon_policy", "incomplete for CP, excluded from ME"}};
}

}  // namespace satrecon::docs
