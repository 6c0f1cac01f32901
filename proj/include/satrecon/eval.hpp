// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "satrecon/mesh.hpp"
#include "satrecon/utm.hpp"

namespace satrecon::eval {

using Vec3 = Eigen::Vector3d;

/// Placement of a height grid: cell (i, j) covers the half-open square
/// [origin_e + i*cell, origin_e + (i+1)*cell) x [origin_n + j*cell, ...).
/// Row j = 0 is the southern edge.
struct GridSpec {
  double origin_e = 0.0;
  double origin_n = 0.0;
  double cell = 0.5;
  int nx = 0;
  int ny = 0;

  void validate() const;
};

struct HeightGrid {
  GridSpec spec;
  int zone = 0;  ///< 0 when not geo-referenced
  utm::Hemisphere hemisphere = utm::Hemisphere::North;
  std::vector<float> heights;  ///< nx * ny, NaN = empty

  static HeightGrid empty(const GridSpec& spec);

  float at(int i, int j) const { return heights[static_cast<std::size_t>(j) * spec.nx + i]; }
  float& at(int i, int j) { return heights[static_cast<std::size_t>(j) * spec.nx + i]; }
  std::size_t valid_count() const;
  void validate() const;
};

std::vector<Vec3> vertex_sample(const TriangleMesh& mesh);

/// Dart throwing on the mesh surface: triangles are picked by area, points
/// uniformly inside them, and a dart is rejected when an accepted sample lies
/// within `radius` (3D distance). Stops after 30 * max(1, ceil(area / r^2))
/// consecutive rejections. Deterministic for a given seed; single-threaded.
std::vector<Vec3> poisson_disk_sample(const TriangleMesh& mesh, double radius, std::uint64_t seed);

/// Per-cell maximum height of the points falling in each cell. Points outside
/// the grid are ignored.
HeightGrid rasterize_height(std::span<const Vec3> points, const GridSpec& spec);

/// One pass: an empty cell with at least 5 of its 8 neighbours valid takes
/// the median of those neighbours. Neighbours are read from the input grid.
HeightGrid fill_holes(const HeightGrid& grid);

/// Correction applied to a reconstruction: aligned(i, j) = recon(i - dx, j - dy) + dz.
struct Alignment {
  int dx = 0;
  int dy = 0;
  double dz = 0.0;

  bool operator==(const Alignment&) const = default;
};

/// Exhaustive search over dx, dy in [-search_cells, search_cells]. For each
/// shift dz is the median of gt - recon over co-valid cells; the winner has
/// the highest completeness, then the lowest median error, then the smallest
/// |dx| + |dy|. Throws EmptyResult when no shift has any co-valid cell.
Alignment refine_alignment(const HeightGrid& recon, const HeightGrid& gt, int search_cells = 10,
                           double completeness_threshold = 1.0);

struct EvalReport {
  double completeness = 0.0;  ///< percent of gt-valid cells with |error| < threshold
  double median_error = 0.0;  ///< meters, over co-valid cells (NaN if none)
  Alignment offset;
  std::size_t evaluated_cells = 0;  ///< co-valid cells
  std::size_t gt_cells = 0;         ///< gt-valid cells
};

struct MetricOptions {
  double completeness_threshold = 1.0;
  bool align = true;
  int search_cells = 10;
};

/// Completeness and median error of `recon` against `gt`. Missing recon cells
/// count as incomplete and are excluded from the median. Throws
/// InvalidArgument when the grids differ in cell size or gt has no valid cell.
EvalReport compute_metrics(const HeightGrid& recon, const HeightGrid& gt,
                           const MetricOptions& options = {});

/// Signed per-cell error (aligned recon - gt) on the gt grid; NaN where either
/// side is missing.
HeightGrid error_grid(const HeightGrid& recon, const HeightGrid& gt, const Alignment& offset);

/// Median with the even-count midpoint rule; `values` is reordered. NaN for
/// an empty input.
double median(std::vector<double>& values);

}  // namespace satrecon::eval
