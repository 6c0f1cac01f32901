// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

// Parallel kernels against their serial reference implementations. The
// thread count follows SATRECON_THREADS / OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "satrecon/depth.hpp"
#include "satrecon/eval.hpp"
#include "satrecon/parallel.hpp"
#include "satrecon/preprocess.hpp"
#include "satrecon/raster.hpp"
#include "satrecon/reference.hpp"

namespace {

using namespace satrecon;

Raster noise_raster(int size, int channels, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(0.0f, 4000.0f);
  std::vector<float> samples(static_cast<std::size_t>(size) * size * channels);
  for (auto& s : samples) s = dist(rng);
  return Raster(size, size, channels, std::move(samples));
}

Eigen::Matrix3d shear_map() {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 1) = 0.013;
  m(0, 2) = 2.5;
  m(1, 2) = -1.25;
  return m;
}

depth::ReparamProjection bench_projection() {
  depth::Mat34 p;
  p << 800.0, 0.4, 250.0, 1000.0,
       0.0, 790.0, 260.0, -500.0,
       0.0, 0.0, 1.0, 3000.0;
  return depth::build_reparam(p, 3000.0, -20.0);
}

depth::DepthMap bench_depth(int size) {
  Raster m = noise_raster(size, 1, 7);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) m.at(x, y) = 1e-3f * m.at(x, y) / 4000.0f;
  return depth::DepthMap{std::move(m), depth::DepthKind::Reparameterized, "bench"};
}

std::vector<eval::Vec3> cloud(int count, double extent) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> xy(0.0, extent);
  std::uniform_real_distribution<double> z(0.0, 30.0);
  std::vector<eval::Vec3> pts(static_cast<std::size_t>(count));
  for (auto& p : pts) p = eval::Vec3(xy(rng), xy(rng), z(rng));
  return pts;
}

eval::GridSpec grid_spec(double extent) {
  eval::GridSpec spec;
  spec.cell = 0.5;
  spec.nx = spec.ny = static_cast<int>(extent / spec.cell);
  return spec;
}

eval::HeightGrid holey_grid(double extent) {
  const auto pts = cloud(static_cast<int>(extent * extent), extent);
  return eval::rasterize_height(pts, grid_spec(extent));
}

void BM_WarpAffine(benchmark::State& state) {
  const Raster r = noise_raster(static_cast<int>(state.range(0)), 3, 1);
  const AffineMap2D map(shear_map());
  for (auto _ : state) benchmark::DoNotOptimize(warp_affine(r, map));
}

void BM_WarpAffineReference(benchmark::State& state) {
  const Raster r = noise_raster(static_cast<int>(state.range(0)), 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(reference::warp_affine(r, shear_map()));
}

void BM_PercentileClip(benchmark::State& state) {
  const Raster r = noise_raster(static_cast<int>(state.range(0)), 3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(preprocess::percentile_clip(r, 0.5, 99.5));
}

void BM_PercentileClipReference(benchmark::State& state) {
  const Raster r = noise_raster(static_cast<int>(state.range(0)), 3, 2);
  for (auto _ : state) benchmark::DoNotOptimize(reference::percentile_clip(r, 0.5, 99.5));
}

void BM_Pansharpen(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const Raster pan = noise_raster(size, 1, 3);
  const Raster msi = noise_raster(size / 4, 3, 4);
  for (auto _ : state) benchmark::DoNotOptimize(preprocess::pansharpen_brovey(pan, msi));
}

void BM_PansharpenReference(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  const Raster pan = noise_raster(size, 1, 3);
  const Raster msi = noise_raster(size / 4, 3, 4);
  const std::array<double, 3> w{1.0 / 3, 1.0 / 3, 1.0 / 3};
  for (auto _ : state) benchmark::DoNotOptimize(reference::pansharpen_brovey(pan, msi, w));
}

void BM_RecoverDepth(benchmark::State& state) {
  const auto dm = bench_depth(static_cast<int>(state.range(0)));
  const auto rp = bench_projection();
  for (auto _ : state) benchmark::DoNotOptimize(depth::recover_depth_map(dm, rp));
}

void BM_RecoverDepthReference(benchmark::State& state) {
  const auto dm = bench_depth(static_cast<int>(state.range(0)));
  const auto rp = bench_projection();
  for (auto _ : state) benchmark::DoNotOptimize(reference::recover_depth_map(dm, rp));
}

void BM_RasterizeHeight(benchmark::State& state) {
  const double extent = static_cast<double>(state.range(0));
  const auto pts = cloud(static_cast<int>(4 * extent * extent), extent);
  const auto spec = grid_spec(extent);
  for (auto _ : state) benchmark::DoNotOptimize(eval::rasterize_height(pts, spec));
}

void BM_RasterizeHeightReference(benchmark::State& state) {
  const double extent = static_cast<double>(state.range(0));
  const auto pts = cloud(static_cast<int>(4 * extent * extent), extent);
  const auto spec = grid_spec(extent);
  for (auto _ : state) benchmark::DoNotOptimize(reference::rasterize_height(pts, spec));
}

void BM_FillHoles(benchmark::State& state) {
  const auto grid = holey_grid(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eval::fill_holes(grid));
}

void BM_FillHolesReference(benchmark::State& state) {
  const auto grid = holey_grid(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::fill_holes(grid));
}

BENCHMARK(BM_WarpAffine)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_WarpAffineReference)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PercentileClip)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PercentileClipReference)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pansharpen)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PansharpenReference)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RecoverDepth)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RecoverDepthReference)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RasterizeHeight)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RasterizeHeightReference)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FillHoles)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FillHolesReference)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  satrecon::configure_threads_from_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
