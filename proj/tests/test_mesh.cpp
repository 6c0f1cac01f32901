// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cstring>
#include <fstream>

#include <gtest/gtest.h>

#include "satrecon/error.hpp"
#include "satrecon/mesh.hpp"
#include "test_support.hpp"

using namespace satrecon;

namespace {

template <typename T>
void put(std::ofstream& out, T v, bool big_endian) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &v, sizeof(T));
  if (big_endian) std::reverse(bytes, bytes + sizeof(T));
  out.write(bytes, sizeof(T));
}

void write_binary_quad(const std::filesystem::path& p, bool big_endian) {
  std::ofstream out(p, std::ios::binary);
  out << "ply\nformat " << (big_endian ? "binary_big_endian" : "binary_little_endian") << " 1.0\n"
      << "comment quad\nelement vertex 4\nproperty float x\nproperty float y\nproperty float z\n"
      << "property uchar red\nelement face 1\nproperty list uchar int vertex_indices\nend_header\n";
  const float v[4][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0.5f}, {0, 1, 0}};
  for (const auto& row : v) {
    for (float c : row) put(out, c, big_endian);
    put<std::uint8_t>(out, 200, big_endian);
  }
  put<std::uint8_t>(out, 4, big_endian);
  for (int i : {0, 1, 2, 3}) put<std::int32_t>(out, i, big_endian);
}

}  // namespace

TEST(Ply, AsciiRoundTripIsExact) {
  testkit::TempDir dir("ply");
  TriangleMesh m;
  m.vertices = {{354000.123456789, 6182000.987654321, 21.5}, {1e-9, -3, 0.1}, {2, 2, 2}};
  m.faces = {{0, 1, 2}};
  save_ply(m, dir / "m.ply");
  const auto back = load_ply(dir / "m.ply");
  EXPECT_EQ(back.vertices, m.vertices);
  EXPECT_EQ(back.faces, m.faces);
}

TEST(Ply, BinaryBothEndiansWithPolygonFan) {
  testkit::TempDir dir("plyb");
  for (bool be : {false, true}) {
    write_binary_quad(dir / "q.ply", be);
    const auto m = load_ply(dir / "q.ply");
    ASSERT_EQ(m.vertices.size(), 4u);
    EXPECT_EQ(m.vertices[2], Eigen::Vector3d(1, 1, 0.5));
    ASSERT_EQ(m.faces.size(), 2u);
    EXPECT_EQ(m.faces[0], (std::array<std::uint32_t, 3>{0, 1, 2}));
    EXPECT_EQ(m.faces[1], (std::array<std::uint32_t, 3>{0, 2, 3}));
  }
}

TEST(Ply, PointCloudWithoutFaces) {
  testkit::TempDir dir("plyp");
  {
    std::ofstream out(dir / "p.ply");
    out << "ply\nformat ascii 1.0\nelement vertex 2\nproperty double x\nproperty double y\n"
           "property double z\nproperty double nx\nend_header\n1 2 3 9\n4 5 6 9\n";
  }
  const auto m = load_ply(dir / "p.ply");
  EXPECT_EQ(m.vertices.size(), 2u);
  EXPECT_TRUE(m.faces.empty());
  EXPECT_EQ(m.vertices[1], Eigen::Vector3d(4, 5, 6));
}

TEST(Ply, Errors) {
  testkit::TempDir dir("plye");
  EXPECT_THROW(load_ply(dir / "missing.ply"), IoError);
  {
    std::ofstream out(dir / "bad.ply");
    out << "plx\n";
  }
  EXPECT_THROW(load_ply(dir / "bad.ply"), FormatError);
  {
    std::ofstream out(dir / "idx.ply");
    out << "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\nproperty float y\nproperty float z\n"
           "element face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0\n3 0 1 2\n";
  }
  EXPECT_THROW(load_ply(dir / "idx.ply"), FormatError);
  {
    std::ofstream out(dir / "short.ply");
    out << "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\n"
           "end_header\n0 0 0\n";
  }
  EXPECT_THROW(load_ply(dir / "short.ply"), FormatError);
}
