// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#include "satrecon/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <unordered_map>

#include <omp.h>

#include <Eigen/Geometry>

#include "satrecon/error.hpp"

namespace satrecon::eval {

void GridSpec::validate() const {
  if (!(cell > 0.0) || !std::isfinite(cell)) throw InvalidArgument("grid cell size must be positive");
  if (nx < 0 || ny < 0) throw InvalidArgument("grid dimensions must be non-negative");
  if (!std::isfinite(origin_e) || !std::isfinite(origin_n)) {
    throw InvalidArgument("grid origin must be finite");
  }
}

HeightGrid HeightGrid::empty(const GridSpec& spec) {
  spec.validate();
  HeightGrid g;
  g.spec = spec;
  g.heights.assign(static_cast<std::size_t>(spec.nx) * spec.ny,
                   std::numeric_limits<float>::quiet_NaN());
  return g;
}

std::size_t HeightGrid::valid_count() const {
  return static_cast<std::size_t>(
      std::count_if(heights.begin(), heights.end(), [](float h) { return !std::isnan(h); }));
}

void HeightGrid::validate() const {
  spec.validate();
  if (heights.size() != static_cast<std::size_t>(spec.nx) * spec.ny) {
    throw InvalidArgument("height grid sample count does not match nx * ny");
  }
}

double median(std::vector<double>& values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t n = values.size();
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), mid);
  return 0.5 * (lower + upper);
}

// ---------------------------------------------------------------------------
// Sampling

std::vector<Vec3> vertex_sample(const TriangleMesh& mesh) { return mesh.vertices; }

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform grid of cell size r over the mesh bounds; each cell holds a linked
// list of sample indices.
class SpatialGrid {
 public:
  SpatialGrid(const Vec3& lo, const Vec3& hi, double cell) : lo_(lo), inv_cell_(1.0 / cell) {
    for (int a = 0; a < 3; ++a) {
      dims_[a] = static_cast<std::int64_t>(std::floor((hi[a] - lo[a]) * inv_cell_)) + 1;
    }
    head_.assign(static_cast<std::size_t>(dims_[0] * dims_[1] * dims_[2]), -1);
  }

  static bool fits(const Vec3& lo, const Vec3& hi, double cell) {
    double n = 1.0;
    for (int a = 0; a < 3; ++a) n *= std::floor((hi[a] - lo[a]) / cell) + 1.0;
    return n <= static_cast<double>(1 << 26);
  }

  bool any_within(const Vec3& p, double r2, const std::vector<Vec3>& pts) const {
    std::int64_t k[3];
    cell_of(p, k);
    for (std::int64_t z = std::max<std::int64_t>(k[2] - 1, 0); z <= std::min(k[2] + 1, dims_[2] - 1); ++z)
      for (std::int64_t y = std::max<std::int64_t>(k[1] - 1, 0); y <= std::min(k[1] + 1, dims_[1] - 1); ++y)
        for (std::int64_t x = std::max<std::int64_t>(k[0] - 1, 0); x <= std::min(k[0] + 1, dims_[0] - 1); ++x)
          for (std::int32_t i = head_[flat(x, y, z)]; i >= 0; i = next_[static_cast<std::size_t>(i)])
            if ((pts[static_cast<std::size_t>(i)] - p).squaredNorm() <= r2) return true;
    return false;
  }

  void insert(const Vec3& p, std::int32_t idx) {
    std::int64_t k[3];
    cell_of(p, k);
    const std::size_t f = flat(k[0], k[1], k[2]);
    next_.push_back(head_[f]);
    head_[f] = idx;
  }

 private:
  void cell_of(const Vec3& p, std::int64_t* k) const {
    for (int a = 0; a < 3; ++a) {
      k[a] = std::clamp(static_cast<std::int64_t>(std::floor((p[a] - lo_[a]) * inv_cell_)), std::int64_t{0},
                        dims_[a] - 1);
    }
  }
  std::size_t flat(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return static_cast<std::size_t>((z * dims_[1] + y) * dims_[0] + x);
  }

  Vec3 lo_;
  double inv_cell_;
  std::int64_t dims_[3];
  std::vector<std::int32_t> head_;
  std::vector<std::int32_t> next_;
};

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

// Sparse fallback for meshes whose bounds are large relative to r.
class SpatialHash {
 public:
  explicit SpatialHash(double cell) : inv_cell_(1.0 / cell) {}

  CellKey key(const Vec3& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x() * inv_cell_)),
            static_cast<std::int64_t>(std::floor(p.y() * inv_cell_)),
            static_cast<std::int64_t>(std::floor(p.z() * inv_cell_))};
  }

  bool any_within(const Vec3& p, double r2, const std::vector<Vec3>& pts) const {
    const CellKey k = key(p);
    for (std::int64_t dz = -1; dz <= 1; ++dz)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
          auto it = cells_.find({k.x + dx, k.y + dy, k.z + dz});
          if (it == cells_.end()) continue;
          for (std::uint32_t idx : it->second)
            if ((pts[idx] - p).squaredNorm() <= r2) return true;
        }
    return false;
  }

  void insert(const Vec3& p, std::int32_t idx) { cells_[key(p)].push_back(static_cast<std::uint32_t>(idx)); }

 private:
  double inv_cell_;
  std::unordered_map<CellKey, std::vector<std::uint32_t>, CellKeyHash> cells_;
};

template <typename Index>
void dart_throw(const TriangleMesh& mesh, const std::vector<double>& cumulative, const std::vector<std::size_t>& tri,
                double area, double r2, std::uint64_t max_rejections, std::uint64_t seed, Index& index,
                std::vector<Vec3>& samples) {
  std::mt19937_64 rng(seed);
  std::uint64_t rejections = 0;
  while (rejections < max_rejections) {
    const double pick = uniform01(rng) * area;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    if (it == cumulative.end()) --it;
    const auto& fc = mesh.faces[tri[static_cast<std::size_t>(it - cumulative.begin())]];
    const double s = std::sqrt(uniform01(rng));
    const double t = uniform01(rng);
    const Vec3 p = (1.0 - s) * mesh.vertices[fc[0]] + s * (1.0 - t) * mesh.vertices[fc[1]] +
                   s * t * mesh.vertices[fc[2]];
    if (index.any_within(p, r2, samples)) {
      ++rejections;
      continue;
    }
    rejections = 0;
    index.insert(p, static_cast<std::int32_t>(samples.size()));
    samples.push_back(p);
  }
}

}  // namespace

std::vector<Vec3> poisson_disk_sample(const TriangleMesh& mesh, double radius, std::uint64_t seed) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("sampling radius must be positive");
  mesh.validate();

  std::vector<double> cumulative;
  std::vector<std::size_t> tri;
  double area = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& fc = mesh.faces[f];
    const Vec3& a = mesh.vertices[fc[0]];
    const double A = 0.5 * (mesh.vertices[fc[1]] - a).cross(mesh.vertices[fc[2]] - a).norm();
    if (!(A > 0.0)) continue;
    area += A;
    cumulative.push_back(area);
    tri.push_back(f);
  }
  std::vector<Vec3> samples;
  if (tri.empty()) return samples;

  const double estimate = std::max(1.0, std::ceil(area / (radius * radius)));
  const auto max_rejections = static_cast<std::uint64_t>(30.0 * estimate);
  const double r2 = radius * radius;

  Vec3 lo = mesh.vertices.front(), hi = lo;
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  if (SpatialGrid::fits(lo, hi, radius)) {
    SpatialGrid grid(lo, hi, radius);
    dart_throw(mesh, cumulative, tri, area, r2, max_rejections, seed, grid, samples);
  } else {
    SpatialHash hash(radius);
    dart_throw(mesh, cumulative, tri, area, r2, max_rejections, seed, hash, samples);
  }
  return samples;
}

// ---------------------------------------------------------------------------
// Height grids

HeightGrid rasterize_height(std::span<const Vec3> points, const GridSpec& spec) {
  HeightGrid grid = HeightGrid::empty(spec);
  const std::size_t ncell = grid.heights.size();
  if (ncell == 0) return grid;

  constexpr float kEmpty = -std::numeric_limits<float>::infinity();
  const int nthreads = omp_get_max_threads();
  std::vector<std::vector<float>> partial(static_cast<std::size_t>(nthreads));
  const auto n = static_cast<std::ptrdiff_t>(points.size());

#pragma omp parallel num_threads(nthreads)
  {
    auto& local = partial[static_cast<std::size_t>(omp_get_thread_num())];
    local.assign(ncell, kEmpty);
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
      const Vec3& p = points[static_cast<std::size_t>(k)];
      const double fi = std::floor((p.x() - spec.origin_e) / spec.cell);
      const double fj = std::floor((p.y() - spec.origin_n) / spec.cell);
      if (!(fi >= 0.0 && fi < spec.nx && fj >= 0.0 && fj < spec.ny) || !std::isfinite(p.z())) continue;
      const std::size_t idx = static_cast<std::size_t>(fj) * spec.nx + static_cast<std::size_t>(fi);
      local[idx] = std::max(local[idx], static_cast<float>(p.z()));
    }
  }

  for (std::size_t c = 0; c < ncell; ++c) {
    float best = kEmpty;
    for (const auto& local : partial)
      if (!local.empty()) best = std::max(best, local[c]);
    if (best != kEmpty) grid.heights[c] = best;
  }
  return grid;
}

HeightGrid fill_holes(const HeightGrid& grid) {
  grid.validate();
  HeightGrid out = grid;
  const int nx = grid.spec.nx;
  const int ny = grid.spec.ny;
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j) {
    std::vector<double> nb;
    nb.reserve(8);
    for (int i = 0; i < nx; ++i) {
      if (!std::isnan(grid.at(i, j))) continue;
      nb.clear();
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0) continue;
          const int a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
          const float v = grid.at(a, b);
          if (!std::isnan(v)) nb.push_back(v);
        }
      if (nb.size() >= 5) out.at(i, j) = static_cast<float>(median(nb));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metrics

namespace {

struct CellOffset {
  int di = 0;
  int dj = 0;
};

// gt cell (i, j) corresponds to recon cell (i + di, j + dj).
CellOffset grid_offset(const HeightGrid& recon, const HeightGrid& gt) {
  recon.validate();
  gt.validate();
  const double cell = gt.spec.cell;
  if (std::abs(recon.spec.cell - cell) > 1e-9 * cell) {
    throw InvalidArgument("recon and ground-truth grids must share the cell size");
  }
  const double fi = (gt.spec.origin_e - recon.spec.origin_e) / cell;
  const double fj = (gt.spec.origin_n - recon.spec.origin_n) / cell;
  const double ri = std::round(fi), rj = std::round(fj);
  if (std::abs(fi - ri) > 1e-6 || std::abs(fj - rj) > 1e-6) {
    throw InvalidArgument("grid origins are not an integer number of cells apart");
  }
  return {static_cast<int>(ri), static_cast<int>(rj)};
}

// Fills `diffs` with gt - recon(i + di - dx, j + dj - dy) over co-valid cells.
void collect_pairs(const HeightGrid& recon, const HeightGrid& gt, CellOffset off, int dx, int dy,
                   std::vector<double>& diffs) {
  diffs.clear();
  const int rnx = recon.spec.nx, rny = recon.spec.ny;
  for (int j = 0; j < gt.spec.ny; ++j) {
    const int rj = j + off.dj - dy;
    if (rj < 0 || rj >= rny) continue;
    for (int i = 0; i < gt.spec.nx; ++i) {
      const float g = gt.at(i, j);
      if (std::isnan(g)) continue;
      const int ri = i + off.di - dx;
      if (ri < 0 || ri >= rnx) continue;
      const float r = recon.at(ri, rj);
      if (std::isnan(r)) continue;
      diffs.push_back(static_cast<double>(g) - static_cast<double>(r));
    }
  }
}

struct Score {
  std::size_t complete = 0;
  double median_error = std::numeric_limits<double>::quiet_NaN();
};

// `diffs` holds gt - recon; error is recon + dz - gt = dz - diff.
Score score(const std::vector<double>& diffs, double dz, double threshold, std::vector<double>& scratch) {
  Score s;
  scratch.clear();
  for (double d : diffs) {
    const double e = std::abs(dz - d);
    scratch.push_back(e);
    if (e < threshold) ++s.complete;
  }
  s.median_error = median(scratch);
  return s;
}

}  // namespace

Alignment refine_alignment(const HeightGrid& recon, const HeightGrid& gt, int search_cells,
                           double completeness_threshold) {
  if (search_cells < 0) throw InvalidArgument("alignment search window must be non-negative");
  const CellOffset off = grid_offset(recon, gt);

  bool found = false;
  Alignment best;
  Score best_score;
  int best_l1 = 0;
  std::vector<double> diffs, scratch, tmp;
  for (int dy = -search_cells; dy <= search_cells; ++dy) {
    for (int dx = -search_cells; dx <= search_cells; ++dx) {
      collect_pairs(recon, gt, off, dx, dy, diffs);
      if (diffs.empty()) continue;
      tmp = diffs;
      const double dz = median(tmp);
      const Score s = score(diffs, dz, completeness_threshold, scratch);
      const int l1 = std::abs(dx) + std::abs(dy);
      bool better = !found;
      if (found) {
        if (s.complete != best_score.complete) better = s.complete > best_score.complete;
        else if (s.median_error != best_score.median_error) better = s.median_error < best_score.median_error;
        else better = l1 < best_l1;
      }
      if (better) {
        found = true;
        best = {dx, dy, dz};
        best_score = s;
        best_l1 = l1;
      }
    }
  }
  if (!found) throw EmptyResult("alignment failed: grids have no overlapping valid cells");
  return best;
}

EvalReport compute_metrics(const HeightGrid& recon, const HeightGrid& gt, const MetricOptions& options) {
  if (!(options.completeness_threshold > 0.0)) {
    throw InvalidArgument("completeness threshold must be positive");
  }
  const CellOffset off = grid_offset(recon, gt);
  EvalReport report;
  report.gt_cells = gt.valid_count();
  if (report.gt_cells == 0) throw InvalidArgument("ground-truth grid has no valid cells");

  if (options.align) {
    report.offset = refine_alignment(recon, gt, options.search_cells, options.completeness_threshold);
  }
  std::vector<double> diffs, scratch;
  collect_pairs(recon, gt, off, report.offset.dx, report.offset.dy, diffs);
  const Score s = score(diffs, report.offset.dz, options.completeness_threshold, scratch);
  report.evaluated_cells = diffs.size();
  report.completeness = 100.0 * static_cast<double>(s.complete) / static_cast<double>(report.gt_cells);
  report.median_error = s.median_error;
  return report;
}

HeightGrid error_grid(const HeightGrid& recon, const HeightGrid& gt, const Alignment& offset) {
  const CellOffset off = grid_offset(recon, gt);
  HeightGrid out = HeightGrid::empty(gt.spec);
  out.zone = gt.zone;
  out.hemisphere = gt.hemisphere;
  for (int j = 0; j < gt.spec.ny; ++j) {
    const int rj = j + off.dj - offset.dy;
    for (int i = 0; i < gt.spec.nx; ++i) {
      const int ri = i + off.di - offset.dx;
      const float g = gt.at(i, j);
      if (std::isnan(g) || ri < 0 || rj < 0 || ri >= recon.spec.nx || rj >= recon.spec.ny) continue;
      const float r = recon.at(ri, rj);
      if (std::isnan(r)) continue;
      out.at(i, j) = static_cast<float>(static_cast<double>(r) + offset.dz - g);
    }
  }
  return out;
}

}  // namespace satrecon::eval
