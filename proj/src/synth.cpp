// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#include "satrecon/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "satrecon/documents.hpp"
#include "satrecon/error.hpp"
#include "satrecon/raster_io.hpp"

namespace satrecon::synth {

using Eigen::Vector3d;

void SynthConfig::validate() const {
  if (boxes < 0 || cameras < 1 || image_size < 8) throw InvalidArgument("invalid synthetic scene size");
  if (!(extent > 10.0) || !(cell > 0.0) || !(standoff > extent)) {
    throw InvalidArgument("invalid synthetic scene geometry");
  }
  if (!(off_nadir_deg >= 0.0 && off_nadir_deg < 60.0)) throw InvalidArgument("off-nadir angle out of range");
}

namespace {

constexpr double kInset = 1e-3;   // keeps walls inside their own grid cells
constexpr double kMargin = 20.0;  // ground plane beyond the evaluated square

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

std::vector<Box> place_boxes(const SynthConfig& cfg, std::mt19937_64& rng) {
  const int cells = static_cast<int>(std::floor(cfg.extent / cfg.cell));
  const int min_side = static_cast<int>(std::ceil(3.0 / cfg.cell));
  const int max_side = static_cast<int>(std::floor(10.0 / cfg.cell));
  const int gap = static_cast<int>(std::ceil(4.0 / cfg.cell));
  const int border = static_cast<int>(std::ceil(2.0 / cfg.cell));

  struct CellBox { int i0, j0, i1, j1; };
  std::vector<CellBox> placed;
  std::vector<Box> out;
  for (int attempt = 0; attempt < 20000 && static_cast<int>(out.size()) < cfg.boxes; ++attempt) {
    const int w = uniform_int(rng, min_side, max_side);
    const int h = uniform_int(rng, min_side, max_side);
    const int i0 = uniform_int(rng, border, cells - border - w);
    const int j0 = uniform_int(rng, border, cells - border - h);
    const CellBox cb{i0, j0, i0 + w, j0 + h};
    const bool clear = std::none_of(placed.begin(), placed.end(), [&](const CellBox& o) {
      return cb.i0 < o.i1 + gap && o.i0 < cb.i1 + gap && cb.j0 < o.j1 + gap && o.j0 < cb.j1 + gap;
    });
    if (!clear) continue;
    placed.push_back(cb);
    const double top = cfg.ground_height + uniform(rng, 2.0, 12.0);
    out.push_back(Box{cfg.origin_e + cb.i0 * cfg.cell + kInset, cfg.origin_n + cb.j0 * cfg.cell + kInset,
                      cfg.origin_e + cb.i1 * cfg.cell - kInset, cfg.origin_n + cb.j1 * cfg.cell - kInset,
                      top});
  }
  if (static_cast<int>(out.size()) < cfg.boxes) {
    throw InvalidArgument("could not place the requested number of boxes; enlarge the extent");
  }
  return out;
}

TriangleMesh build_mesh(const SynthConfig& cfg, const std::vector<Box>& boxes) {
  TriangleMesh mesh;
  auto add = [&](const Vector3d& v) {
    mesh.vertices.push_back(v);
    return static_cast<std::uint32_t>(mesh.vertices.size() - 1);
  };
  auto quad = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    mesh.faces.push_back({a, b, c});
    mesh.faces.push_back({a, c, d});
  };
  const double g = cfg.ground_height;
  const double e0 = cfg.origin_e - kMargin, e1 = cfg.origin_e + cfg.extent + kMargin;
  const double n0 = cfg.origin_n - kMargin, n1 = cfg.origin_n + cfg.extent + kMargin;
  quad(add({e0, n0, g}), add({e1, n0, g}), add({e1, n1, g}), add({e0, n1, g}));

  for (const auto& b : boxes) {
    const auto b00 = add({b.x0, b.y0, g}), b10 = add({b.x1, b.y0, g});
    const auto b11 = add({b.x1, b.y1, g}), b01 = add({b.x0, b.y1, g});
    const auto t00 = add({b.x0, b.y0, b.top}), t10 = add({b.x1, b.y0, b.top});
    const auto t11 = add({b.x1, b.y1, b.top}), t01 = add({b.x0, b.y1, b.top});
    quad(t00, t10, t11, t01);  // roof
    quad(b00, b10, t10, t00);  // south
    quad(b10, b11, t11, t10);  // east
    quad(b11, b01, t01, t11);  // north
    quad(b01, b00, t00, t01);  // west
  }
  return mesh;
}

eval::HeightGrid analytic_dsm(const SynthConfig& cfg, const std::vector<Box>& boxes) {
  const int n = static_cast<int>(std::floor(cfg.extent / cfg.cell));
  eval::HeightGrid grid = eval::HeightGrid::empty({cfg.origin_e, cfg.origin_n, cfg.cell, n, n});
  grid.zone = cfg.zone;
  grid.hemisphere = cfg.hemisphere;
  std::fill(grid.heights.begin(), grid.heights.end(), static_cast<float>(cfg.ground_height));
  for (const auto& b : boxes) {
    const int i0 = static_cast<int>(std::floor((b.x0 - cfg.origin_e) / cfg.cell));
    const int i1 = static_cast<int>(std::floor((b.x1 - cfg.origin_e) / cfg.cell));
    const int j0 = static_cast<int>(std::floor((b.y0 - cfg.origin_n) / cfg.cell));
    const int j1 = static_cast<int>(std::floor((b.y1 - cfg.origin_n) / cfg.cell));
    for (int j = std::max(j0, 0); j <= std::min(j1, n - 1); ++j)
      for (int i = std::max(i0, 0); i <= std::min(i1, n - 1); ++i)
        grid.at(i, j) = std::max(grid.at(i, j), static_cast<float>(b.top));
  }
  return grid;
}

// Look-at rotation (world to camera) with the camera z axis along `forward`.
camera::Mat3 look_rotation(const Vector3d& forward, const Vector3d& up_hint) {
  const Vector3d z = forward.normalized();
  const Vector3d x = up_hint.cross(z).normalized();
  const Vector3d y = z.cross(x);
  camera::Mat3 r;
  r.row(0) = x.transpose();
  r.row(1) = y.transpose();
  r.row(2) = z.transpose();
  return r;
}

double texture(const Vector3d& p) {
  // Deterministic value noise on a 0.7 m lattice, enough structure for
  // matching-style consumers of the images.
  const auto ix = static_cast<std::int64_t>(std::floor(p.x() / 0.7));
  const auto iy = static_cast<std::int64_t>(std::floor(p.y() / 0.7));
  const auto iz = static_cast<std::int64_t>(std::floor(p.z() / 0.7));
  std::uint64_t h = static_cast<std::uint64_t>(ix) * 0x9E3779B97F4A7C15ull ^
                    static_cast<std::uint64_t>(iy) * 0xC2B2AE3D27D4EB4Full ^
                    static_cast<std::uint64_t>(iz) * 0x165667B19E3779F9ull;
  h ^= h >> 29;
  h *= 0xBF58476D1CE4E5B9ull;
  h ^= h >> 32;
  return 0.6 + 0.4 * static_cast<double>(h & 0xFFFF) / 65535.0;
}

}  // namespace

std::optional<Hit> cast_ray(const SyntheticScene& scene, const Vector3d& origin, const Vector3d& dir) {
  std::optional<Hit> best;
  const double g = scene.config.ground_height;
  if (dir.z() < 0.0) {
    const double t = (g - origin.z()) / dir.z();
    if (t > 0.0) best = Hit{t, Vector3d(0, 0, 1)};
  }
  for (const auto& b : scene.boxes) {
    const double lo[3] = {b.x0, b.y0, g};
    const double hi[3] = {b.x1, b.y1, b.top};
    double tmin = -std::numeric_limits<double>::infinity();
    double tmax = std::numeric_limits<double>::infinity();
    int axis = -1;
    double sign = 0.0;
    bool miss = false;
    for (int a = 0; a < 3 && !miss; ++a) {
      if (dir[a] == 0.0) {
        miss = origin[a] < lo[a] || origin[a] > hi[a];
        continue;
      }
      double t0 = (lo[a] - origin[a]) / dir[a];
      double t1 = (hi[a] - origin[a]) / dir[a];
      double s = -1.0;  // entering through the low face
      if (t0 > t1) {
        std::swap(t0, t1);
        s = 1.0;
      }
      if (t0 > tmin) {
        tmin = t0;
        axis = a;
        sign = s;
      }
      tmax = std::min(tmax, t1);
      miss = tmin > tmax;
    }
    if (miss || axis < 0 || tmin <= 0.0) continue;
    if (!best || tmin < best->t) {
      Vector3d n = Vector3d::Zero();
      n[axis] = sign;
      best = Hit{tmin, n};
    }
  }
  return best;
}

SyntheticScene generate_synthetic_scene(const SynthConfig& config, std::uint64_t seed) {
  config.validate();
  SyntheticScene scene;
  scene.config = config;
  scene.seed = seed;
  std::mt19937_64 rng(seed);
  scene.boxes = place_boxes(config, rng);
  scene.mesh = build_mesh(config, scene.boxes);
  scene.ground_truth = analytic_dsm(config, scene.boxes);

  const Vector3d center(config.origin_e + config.extent / 2, config.origin_n + config.extent / 2,
                        config.ground_height);
  const Vector3d sun = Vector3d(0.3, 0.2, 1.0).normalized();
  const int size = config.image_size;
  const double theta = config.off_nadir_deg * std::numbers::pi / 180.0;
  const double d_plane = config.ground_height - 10.0;

  for (int k = 0; k < config.cameras; ++k) {
    const double azimuth = 2.0 * std::numbers::pi * k / config.cameras + uniform(rng, -0.2, 0.2);
    const Vector3d offset(std::sin(theta) * std::cos(azimuth), std::sin(theta) * std::sin(azimuth),
                          std::cos(theta));
    const Vector3d cam_center = center + config.standoff * offset;

    camera::FpcCamera cam;
    cam.rotation = look_rotation(center - cam_center, Vector3d(0, 1, 0));
    cam.translation = -cam.rotation * cam_center;
    const double f = size * config.standoff / (config.extent + 10.0);
    cam.intrinsics.fx = f;
    cam.intrinsics.fy = f * uniform(rng, 0.98, 1.02);
    cam.intrinsics.s = f * uniform(rng, 0.01, 0.03) * (k % 2 == 0 ? 1.0 : -1.0);
    cam.intrinsics.px = size / 2.0 + uniform(rng, -8.0, 8.0);
    cam.intrinsics.py = size / 2.0 + uniform(rng, -8.0, 8.0);
    cam.validate();

    const camera::Mat3 kinv = camera::fpc_invert(cam.intrinsics);
    const camera::Mat3 rt = cam.rotation.transpose();

    // Conventional depth per pixel first; z_bar is their mean.
    std::vector<double> zbuf(static_cast<std::size_t>(size) * size, -1.0);
    std::vector<double> heights(zbuf.size(), 0.0);
    Raster image(size, size, 1);
    double zsum = 0.0;
    std::size_t zcount = 0;
    for (int v = 0; v < size; ++v) {
      for (int u = 0; u < size; ++u) {
        const Vector3d dc = kinv * Vector3d(u, v, 1.0);  // camera-frame ray with z = 1
        const Vector3d dir = rt * dc;
        const auto hit = cast_ray(scene, cam_center, dir);
        if (!hit) continue;
        const Vector3d x = cam_center + hit->t * dir;
        const std::size_t idx = static_cast<std::size_t>(v) * size + u;
        zbuf[idx] = hit->t;  // dc.z() == 1, so the ray parameter is the depth
        heights[idx] = x.z();
        zsum += hit->t;
        ++zcount;
        const double shade = 0.15 + 0.85 * std::max(0.0, hit->normal.dot(sun));
        image.at(u, v) = static_cast<float>(1000.0 * shade * texture(x));
      }
    }
    if (zcount == 0) throw InvalidArgument("synthetic camera sees nothing");
    const double z_bar = zsum / static_cast<double>(zcount);

    RenderedView view;
    view.id = "cam" + std::to_string(k);
    view.camera = cam;
    view.image = std::move(image);
    view.projection = depth::build_reparam(cam.projection_matrix(), z_bar, d_plane);
    view.depth = depth::DepthMap{Raster(size, size, 1), depth::DepthKind::Reparameterized, view.id};
    for (int v = 0; v < size; ++v) {
      for (int u = 0; u < size; ++u) {
        const std::size_t idx = static_cast<std::size_t>(v) * size + u;
        if (zbuf[idx] <= 0.0) continue;
        view.depth.raster.at(u, v) = static_cast<float>(z_bar * (heights[idx] - d_plane) / zbuf[idx]);
      }
    }
    scene.views.push_back(std::move(view));
  }
  return scene;
}

void write_scene(const SyntheticScene& scene, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
  save_ply(scene.mesh, dir / "mesh.ply");
  docs::save_height_grid(scene.ground_truth, dir / "gt.hgrid");

  docs::Json summary{{"seed", scene.seed},
                     {"boxes", docs::Json::array()},
                     {"cameras", docs::Json::array()},
                     {"ground_height", scene.config.ground_height},
                     {"extent", scene.config.extent},
                     {"cell", scene.config.cell}};
  for (const auto& b : scene.boxes) {
    summary["boxes"].push_back({b.x0, b.y0, b.x1, b.y1, b.top});
  }
  for (std::size_t k = 0; k < scene.views.size(); ++k) {
    const auto& v = scene.views[k];
    const std::string suffix = std::to_string(k);
    docs::save_camera({v.id, v.camera, std::nullopt}, dir / ("cam_" + suffix + ".json"));
    save_raster(v.image, dir / ("img_" + suffix + ".srtk"));
    docs::save_depth({v.depth, v.projection}, dir / ("depth_" + suffix + ".srtk"));
    summary["cameras"].push_back(v.id);
  }
  docs::write_json(summary, dir / "scene.json");
}

}  // namespace satrecon::synth
