// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#include "satrecon/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "satrecon/camera.hpp"
#include "satrecon/depth.hpp"
#include "satrecon/documents.hpp"
#include "satrecon/error.hpp"
#include "satrecon/eval.hpp"
#include "satrecon/image_formats.hpp"
#include "satrecon/mesh.hpp"
#include "satrecon/parallel.hpp"
#include "satrecon/preprocess.hpp"
#include "satrecon/raster_io.hpp"
#include "satrecon/synth.hpp"

namespace satrecon::cli {
namespace {

namespace fs = std::filesystem;

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

Raster load_any_raster(const fs::path& p) {
  const auto ext = lower_ext(p);
  if (ext == ".png") return load_png(p);
  if (ext == ".pfm") return load_pfm(p);
  return load_raster(p);
}

void save_any_raster(const Raster& r, const fs::path& p) {
  const auto ext = lower_ext(p);
  if (ext == ".png") return save_png(r, p);
  if (ext == ".pfm") return save_pfm(r, p);
  save_raster(r, p);
}

utm::Hemisphere parse_hemisphere(const std::string& h) {
  if (h == "N" || h == "n") return utm::Hemisphere::North;
  if (h == "S" || h == "s") return utm::Hemisphere::South;
  throw InvalidArgument("hemisphere must be N or S");
}

// ---------------------------------------------------------------------------

struct AoiArgs {
  std::vector<std::string> images, metas;
  std::vector<double> aoi;
  int zone = 0;
  std::string hemisphere = "N";
  double height = 0.0;
  double cloud_threshold = 0.5;
  std::string out_dir;
};

void cmd_aoi_extract(const AoiArgs& a, std::ostream& err) {
  if (a.images.size() != a.metas.size()) {
    throw InvalidArgument("--image and --meta must be given the same number of times");
  }
  preprocess::AoiBox box{a.aoi[0], a.aoi[1], a.aoi[2], a.aoi[3], a.zone, parse_hemisphere(a.hemisphere)};
  box.validate();
  fs::create_directories(a.out_dir);

  std::vector<preprocess::SceneMetadata> metas;
  std::vector<docs::SceneFile> scenes;
  for (const auto& m : a.metas) {
    scenes.push_back(docs::load_scene(m));
    metas.push_back(scenes.back().meta);
  }
  const auto kept = preprocess::filter_by_cloud_cover(metas, a.cloud_threshold);
  for (std::size_t k = 0; k < scenes.size(); ++k) {
    const auto& meta = scenes[k].meta;
    const bool keep = std::any_of(kept.begin(), kept.end(), [&](const auto& s) { return s.id == meta.id; });
    if (!keep) {
      err << "skipping " << meta.id << ": cloud cover " << meta.cloud_cover << " > " << a.cloud_threshold << "\n";
      continue;
    }
    if (!scenes[k].rpc) throw InvalidArgument("scene '" + meta.id + "' has no rpc model");
    const Raster img = load_any_raster(a.images[k]);
    const auto pb = preprocess::aoi_to_pixel_bbox(*scenes[k].rpc, box, a.height, img.width(), img.height());
    const fs::path out = fs::path(a.out_dir) / (meta.id + "_aoi.srtk");
    save_raster(crop(img, pb.x, pb.y, pb.width, pb.height), out);
    docs::write_json({{"source", a.images[k]}, {"x", pb.x}, {"y", pb.y}, {"width", pb.width},
                      {"height", pb.height}},
                     docs::sidecar_path(out));
    err << meta.id << ": AOI box x=" << pb.x << " y=" << pb.y << " " << pb.width << "x" << pb.height << "\n";
  }
}

struct ToneArgs {
  std::string image, out;
  std::vector<double> percentiles{0.5, 99.5};
};

void cmd_tonemap(const ToneArgs& a) {
  save_any_raster(preprocess::tonemap(load_any_raster(a.image), a.percentiles[0], a.percentiles[1]), a.out);
}

struct PanArgs {
  std::string pan, msi, out;
  std::vector<double> weights{1.0 / 3, 1.0 / 3, 1.0 / 3};
};

void cmd_pansharpen(const PanArgs& a) {
  const auto out = preprocess::pansharpen_brovey(load_any_raster(a.pan), load_any_raster(a.msi),
                                                 {a.weights[0], a.weights[1], a.weights[2]});
  save_any_raster(out, a.out);
}

struct SkewArgs {
  std::string camera, image, depth, out_camera, out_image, out_depth;
};

// img.srtk -> img.noskew.srtk
fs::path noskew_path(const fs::path& p) {
  fs::path out = p;
  out.replace_extension();
  out += ".noskew";
  out += p.extension();
  return out;
}

void cmd_skew_correct(const SkewArgs& a, std::ostream& err) {
  auto cam = docs::load_camera(a.camera);
  if (!cam.fpc) throw InvalidArgument("camera file has no fpc model");
  const auto dec = camera::decompose_skew(cam.fpc->intrinsics);
  err << "skew = " << cam.fpc->intrinsics.s << "\n";

  if (!a.out_camera.empty()) {
    docs::CameraFile out = cam;
    out.fpc = camera::with_intrinsics(*cam.fpc, dec.k_s);
    docs::save_camera(out, a.out_camera);
  }
  if (!a.image.empty()) {
    const fs::path dst = a.out_image.empty() ? noskew_path(a.image) : fs::path(a.out_image);
    save_any_raster(warp_affine(load_any_raster(a.image), AffineMap2D(dec.t_sp)), dst);
  }
  if (!a.depth.empty()) {
    const fs::path dst = a.out_depth.empty() ? noskew_path(a.depth) : fs::path(a.out_depth);
    auto dfile = docs::load_depth(a.depth);
    docs::DepthFile out{depth::skew_correct_depth_map(dfile.map, dec.t_sp), std::nullopt};
    if (dfile.projection) out.projection = depth::skew_correct_reparam(*dfile.projection, dec.t_sp);
    docs::save_depth(out, dst);
  }
}

struct RecoverArgs {
  std::string depth, proj, out;
};

void cmd_depth_recover(const RecoverArgs& a) {
  auto dfile = docs::load_depth(a.depth);
  std::optional<depth::ReparamProjection> rp = dfile.projection;
  if (!a.proj.empty()) rp = docs::reparam_from_json(docs::read_json(a.proj));
  if (!rp) throw InvalidArgument("no reparameterized projection: pass --proj or a sidecar with 'P'");
  docs::save_depth({depth::recover_depth_map(dfile.map, *rp), rp}, a.out);
}

struct FuseArgs {
  std::vector<std::string> depths;
  double tolerance = 0.1;
  int min_views = 2;
  std::string out;
};

void cmd_fuse(const FuseArgs& a, std::ostream& err) {
  std::vector<depth::View> views;
  for (const auto& p : a.depths) {
    auto f = docs::load_depth(p);
    if (!f.projection) throw InvalidArgument("depth map '" + p + "' has no projection in its sidecar");
    views.push_back({std::move(f.map), *f.projection});
  }
  const auto pts = depth::fuse_depth_maps(views, {a.min_views, a.tolerance});
  TriangleMesh cloud;
  cloud.vertices = pts;
  save_ply(cloud, a.out);
  err << "fused " << pts.size() << " points\n";
}

struct SampleArgs {
  std::string mesh, method = "poisson", out;
  double radius = 0.25;
  std::uint64_t seed = 0;
};

std::vector<eval::Vec3> sample_surface(const TriangleMesh& mesh, const std::string& method, double radius,
                                       std::uint64_t seed, std::ostream& err) {
  if (method == "vertex") return eval::vertex_sample(mesh);
  if (mesh.faces.empty()) {
    err << "mesh has no faces; using its vertices\n";
    return eval::vertex_sample(mesh);
  }
  return eval::poisson_disk_sample(mesh, radius, seed);
}

void cmd_sample_mesh(const SampleArgs& a, std::ostream& err) {
  TriangleMesh cloud;
  cloud.vertices = sample_surface(load_ply(a.mesh), a.method, a.radius, a.seed, err);
  save_ply(cloud, a.out);
  err << "sampled " << cloud.vertices.size() << " points\n";
}

struct EvalArgs {
  std::string recon, gt, out, error_raster, sampling = "poisson";
  double cell = 0.5;
  double threshold = 1.0;
  bool no_align = false;
  bool no_fill = false;
  int search = 10;
  double radius = 0.0;
  std::uint64_t seed = 0;
};

void cmd_evaluate(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const auto gt = docs::load_height_grid(a.gt);
  if (std::abs(gt.spec.cell - a.cell) > 1e-9 * a.cell) {
    throw InvalidArgument("--cell " + std::to_string(a.cell) + " does not match the ground-truth cell " +
                          std::to_string(gt.spec.cell));
  }
  const double radius = a.radius > 0.0 ? a.radius : a.cell / 2.0;
  const auto pts = sample_surface(load_ply(a.recon), a.sampling, radius, a.seed, err);
  auto grid = eval::rasterize_height(pts, gt.spec);
  if (!a.no_fill) grid = eval::fill_holes(grid);

  const eval::MetricOptions opts{a.threshold, !a.no_align, a.search};
  const auto report = eval::compute_metrics(grid, gt, opts);
  const auto doc = docs::report_to_json(report, a.threshold);
  if (a.out.empty()) {
    out << doc.dump(2) << "\n";
  } else {
    docs::write_json(doc, a.out);
  }
  if (!a.error_raster.empty()) {
    docs::save_height_grid(eval::error_grid(grid, gt, report.offset), a.error_raster);
  }
  err << "CP " << report.completeness << " %, ME " << report.median_error << " m\n";
}

struct SynthArgs {
  std::string out_dir;
  std::uint64_t seed = 1;
  int boxes = 20, cameras = 4, size = 512;
  double extent = 80.0;
};

void cmd_synth(const SynthArgs& a, std::ostream& err) {
  synth::SynthConfig cfg;
  cfg.boxes = a.boxes;
  cfg.cameras = a.cameras;
  cfg.image_size = a.size;
  cfg.extent = a.extent;
  const auto scene = synth::generate_synthetic_scene(cfg, a.seed);
  synth::write_scene(scene, a.out_dir);
  err << "wrote " << scene.views.size() << " views and " << scene.boxes.size() << " boxes to " << a.out_dir << "\n";
}

struct ConvertArgs {
  std::string in, out;
  double cell = 0.5;
};

void cmd_convert(const ConvertArgs& a, std::ostream& err) {
  const auto in_ext = lower_ext(a.in);
  const auto out_ext = lower_ext(a.out);
  if (in_ext == ".ply" && out_ext == ".ply") {
    save_ply(load_ply(a.in), a.out);
  } else if (in_ext == ".ply" && out_ext == ".hgrid") {
    const auto mesh = load_ply(a.in);
    if (mesh.vertices.empty()) throw InvalidArgument("PLY has no vertices");
    double e0 = mesh.vertices[0].x(), e1 = e0, n0 = mesh.vertices[0].y(), n1 = n0;
    for (const auto& v : mesh.vertices) {
      e0 = std::min(e0, v.x());
      e1 = std::max(e1, v.x());
      n0 = std::min(n0, v.y());
      n1 = std::max(n1, v.y());
    }
    const eval::GridSpec spec{std::floor(e0 / a.cell) * a.cell, std::floor(n0 / a.cell) * a.cell, a.cell, 0, 0};
    eval::GridSpec s = spec;
    s.nx = static_cast<int>(std::floor((e1 - spec.origin_e) / a.cell)) + 1;
    s.ny = static_cast<int>(std::floor((n1 - spec.origin_n) / a.cell)) + 1;
    docs::save_height_grid(eval::rasterize_height(mesh.vertices, s), a.out);
  } else {
    const std::array<std::string, 4> raster_exts{".png", ".pfm", ".srtk", ".hgrid"};
    auto ok = [&](const std::string& e) {
      return std::find(raster_exts.begin(), raster_exts.end(), e) != raster_exts.end();
    };
    if (!ok(in_ext) || !ok(out_ext)) {
      throw InvalidArgument("unsupported conversion " + in_ext + " -> " + out_ext);
    }
    save_any_raster(load_any_raster(a.in), a.out);
  }
  err << "converted " << a.in << " -> " << a.out << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"satrecon: satellite surface-reconstruction toolkit", "satrecon"};
  app.set_config("--config", "", "Key-value config file mirroring the flags (flags override)");
  app.require_subcommand(1);
  int threads = -1;
  app.add_option("--threads", threads, "Worker threads (0 = auto; default SATRECON_THREADS)");

  std::function<void()> action;

  AoiArgs aoi;
  auto* c_aoi = app.add_subcommand("aoi-extract", "Crop images to a UTM area of interest via their RPC");
  c_aoi->add_option("--image", aoi.images, "Input raster (repeatable)")->required();
  c_aoi->add_option("--meta", aoi.metas, "Scene metadata sidecar per image (repeatable)")->required();
  c_aoi->add_option("--aoi", aoi.aoi, "emin nmin emax nmax (meters)")->expected(4)->required();
  c_aoi->add_option("--zone", aoi.zone, "UTM zone")->required()->check(CLI::Range(1, 60));
  c_aoi->add_option("--hemisphere", aoi.hemisphere, "N or S")->capture_default_str()->check(CLI::IsMember({"N", "S"}));
  c_aoi->add_option("--height", aoi.height, "Projection height of the AOI, meters")->capture_default_str();
  c_aoi->add_option("--cloud-threshold", aoi.cloud_threshold, "Maximum cloud cover fraction")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  c_aoi->add_option("--out-dir", aoi.out_dir, "Output directory")->required();
  c_aoi->callback([&] { action = [&] { cmd_aoi_extract(aoi, err); }; });

  ToneArgs tone;
  auto* c_tone = app.add_subcommand("tonemap", "Percentile clip + gamma 1/2.2 to 8-bit range");
  c_tone->add_option("--image", tone.image, "Input raster")->required();
  c_tone->add_option("--out", tone.out, "Output (.srtk, .png or .pfm)")->required();
  c_tone->add_option("--percentiles", tone.percentiles, "lo,hi")->delimiter(',')->expected(2)->capture_default_str();
  c_tone->callback([&] { action = [&] { cmd_tonemap(tone); }; });

  PanArgs pan;
  auto* c_pan = app.add_subcommand("pansharpen", "Weighted Brovey pan-sharpening");
  c_pan->add_option("--pan", pan.pan, "Panchromatic raster (1 channel)")->required();
  c_pan->add_option("--msi", pan.msi, "Multispectral raster (3 channels)")->required();
  c_pan->add_option("--weights", pan.weights, "r,g,b")->delimiter(',')->expected(3)->capture_default_str();
  c_pan->add_option("--out", pan.out, "Output raster")->required();
  c_pan->callback([&] { action = [&] { cmd_pansharpen(pan); }; });

  SkewArgs skew;
  auto* c_skew = app.add_subcommand("skew-correct", "Replace a skewed camera by a skew-free one and warp its data");
  c_skew->add_option("--camera", skew.camera, "Camera file with an fpc model")->required();
  c_skew->add_option("--image", skew.image, "Image to correct");
  c_skew->add_option("--depth", skew.depth, "Depth map (with sidecar) to correct");
  c_skew->add_option("--out-camera", skew.out_camera, "Skew-free camera file");
  c_skew->add_option("--out-image", skew.out_image, "Corrected image (default: <image>.noskew.<ext>)");
  c_skew->add_option("--out-depth", skew.out_depth, "Corrected depth map (default: <depth>.noskew.<ext>)");
  c_skew->callback([&] { action = [&] { cmd_skew_correct(skew, err); }; });

  RecoverArgs rec;
  auto* c_rec = app.add_subcommand("depth-recover", "Reparameterized depth m -> metric depth Z");
  c_rec->add_option("--depth", rec.depth, "Depth map of kind m")->required();
  c_rec->add_option("--proj", rec.proj, "Projection document (default: the depth sidecar)");
  c_rec->add_option("--out", rec.out, "Metric depth map")->required();
  c_rec->callback([&] { action = [&] { cmd_depth_recover(rec); }; });

  FuseArgs fuse;
  auto* c_fuse = app.add_subcommand("fuse", "Back-project metric depth maps to a consistent point cloud");
  c_fuse->add_option("--depth", fuse.depths, "Metric depth map (repeatable)")->required();
  c_fuse->add_option("--tolerance", fuse.tolerance, "Depth agreement tolerance, meters")->capture_default_str();
  c_fuse->add_option("--min-views", fuse.min_views, "Other views that must agree")->capture_default_str();
  c_fuse->add_option("--out", fuse.out, "Output PLY")->required();
  c_fuse->callback([&] { action = [&] { cmd_fuse(fuse, err); }; });

  SampleArgs samp;
  auto* c_samp = app.add_subcommand("sample-mesh", "Sample points from a mesh surface");
  c_samp->add_option("--mesh", samp.mesh, "Input PLY")->required();
  c_samp->add_option("--method", samp.method, "poisson or vertex")->capture_default_str()
      ->check(CLI::IsMember({"poisson", "vertex"}));
  c_samp->add_option("--radius", samp.radius, "Poisson disk radius, meters")->capture_default_str();
  c_samp->add_option("--seed", samp.seed, "Random seed")->capture_default_str();
  c_samp->add_option("--out", samp.out, "Output PLY")->required();
  c_samp->callback([&] { action = [&] { cmd_sample_mesh(samp, err); }; });

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "Completeness and median error against a ground-truth grid");
  c_ev->add_option("--recon", ev.recon, "Reconstructed mesh or point cloud (PLY)")->required();
  c_ev->add_option("--gt", ev.gt, "Ground-truth height grid")->required();
  c_ev->add_option("--cell", ev.cell, "Grid cell size, meters")->capture_default_str();
  c_ev->add_option("--threshold", ev.threshold, "Completeness threshold, meters")->capture_default_str();
  c_ev->add_option("--search", ev.search, "Alignment search window, cells")->capture_default_str();
  c_ev->add_flag("--no-align", ev.no_align, "Skip alignment refinement");
  c_ev->add_flag("--no-fill", ev.no_fill, "Skip hole filling");
  c_ev->add_option("--sampling", ev.sampling, "poisson or vertex")->capture_default_str()
      ->check(CLI::IsMember({"poisson", "vertex"}));
  c_ev->add_option("--radius", ev.radius, "Poisson disk radius (default: cell / 2)");
  c_ev->add_option("--seed", ev.seed, "Sampling seed")->capture_default_str();
  c_ev->add_option("--out", ev.out, "Report file (default: standard output)");
  c_ev->add_option("--error-raster", ev.error_raster, "Per-cell signed error grid");
  c_ev->callback([&] { action = [&] { cmd_evaluate(ev, out, err); }; });

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("synth", "Generate a synthetic boxes-on-a-plane scene");
  c_syn->add_option("--out-dir", syn.out_dir, "Output directory")->required();
  c_syn->add_option("--seed", syn.seed, "Random seed")->capture_default_str();
  c_syn->add_option("--boxes", syn.boxes, "Number of boxes")->capture_default_str();
  c_syn->add_option("--cameras", syn.cameras, "Number of cameras")->capture_default_str();
  c_syn->add_option("--size", syn.size, "Image width and height, pixels")->capture_default_str();
  c_syn->add_option("--extent", syn.extent, "Scene side length, meters")->capture_default_str();
  c_syn->callback([&] { action = [&] { cmd_synth(syn, err); }; });

  ConvertArgs conv;
  auto* c_conv = app.add_subcommand("convert", "Convert between PNG/PFM/SRTK rasters and PLY/height grids");
  c_conv->add_option("--in", conv.in, "Input file")->required();
  c_conv->add_option("--out", conv.out, "Output file")->required();
  c_conv->add_option("--cell", conv.cell, "Cell size for PLY -> .hgrid")->capture_default_str();
  c_conv->callback([&] { action = [&] { cmd_convert(conv, err); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return kExitUsage;
  }

  try {
    if (threads >= 0) set_thread_count(threads);
    else configure_threads_from_env();
    if (action) action();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
  return kExitOk;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace satrecon::cli
