// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

namespace satrecon {

/// Vertices in world units (easting, northing, height); faces index into
/// `vertices`. A point cloud is a mesh without faces.
struct TriangleMesh {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<std::array<std::uint32_t, 3>> faces;

  /// Throws InvalidArgument for out-of-range indices or a face that repeats a
  /// vertex.
  void validate() const;
  bool empty() const { return vertices.empty(); }
};

/// Reads ascii, binary_little_endian or binary_big_endian PLY. Uses the
/// x/y/z vertex properties and the first list property of the face element
/// (vertex_indices / vertex_index); polygons are fan-triangulated. Other
/// elements and properties are skipped.
TriangleMesh load_ply(const std::filesystem::path& path);

/// Writes ascii PLY with double-precision coordinates (17 significant digits).
void save_ply(const TriangleMesh& mesh, const std::filesystem::path& path);

}  // namespace satrecon
