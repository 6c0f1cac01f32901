// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#include "satrecon/mesh.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "satrecon/error.hpp"

namespace satrecon {

void TriangleMesh::validate() const {
  const auto n = vertices.size();
  for (const auto& f : faces) {
    if (f[0] >= n || f[1] >= n || f[2] >= n) throw InvalidArgument("face index out of range");
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
      throw InvalidArgument("face repeats a vertex index");
    }
  }
}

namespace {

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::optional<PlyType> parse_type(const std::string& t) {
  if (t == "char" || t == "int8") return PlyType::Int8;
  if (t == "uchar" || t == "uint8") return PlyType::UInt8;
  if (t == "short" || t == "int16") return PlyType::Int16;
  if (t == "ushort" || t == "uint16") return PlyType::UInt16;
  if (t == "int" || t == "int32") return PlyType::Int32;
  if (t == "uint" || t == "uint32") return PlyType::UInt32;
  if (t == "float" || t == "float32") return PlyType::Float32;
  if (t == "double" || t == "float64") return PlyType::Float64;
  return std::nullopt;
}

std::size_t type_size(PlyType t) {
  switch (t) {
    case PlyType::Int8: case PlyType::UInt8: return 1;
    case PlyType::Int16: case PlyType::UInt16: return 2;
    case PlyType::Int32: case PlyType::UInt32: case PlyType::Float32: return 4;
    case PlyType::Float64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::Float32;
  bool is_list = false;
  PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

enum class PlyFormat { Ascii, BinaryLE, BinaryBE };

class ValueReader {
 public:
  ValueReader(std::istream& in, PlyFormat fmt) : in_(in), fmt_(fmt) {}

  double read(PlyType t) {
    if (fmt_ == PlyFormat::Ascii) {
      double v;
      if (!(in_ >> v)) throw FormatError("PLY ascii body ended early or is malformed");
      return v;
    }
    unsigned char buf[8];
    const std::size_t n = type_size(t);
    in_.read(reinterpret_cast<char*>(buf), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw FormatError("PLY binary body truncated");
    const bool file_le = fmt_ == PlyFormat::BinaryLE;
    if (file_le != (std::endian::native == std::endian::little)) std::reverse(buf, buf + n);
    switch (t) {
      case PlyType::Int8: { std::int8_t v; std::memcpy(&v, buf, 1); return v; }
      case PlyType::UInt8: return buf[0];
      case PlyType::Int16: { std::int16_t v; std::memcpy(&v, buf, 2); return v; }
      case PlyType::UInt16: { std::uint16_t v; std::memcpy(&v, buf, 2); return v; }
      case PlyType::Int32: { std::int32_t v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::UInt32: { std::uint32_t v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::Float32: { float v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::Float64: { double v; std::memcpy(&v, buf, 8); return v; }
    }
    return 0.0;
  }

 private:
  std::istream& in_;
  PlyFormat fmt_;
};

std::uint32_t to_index(double v) {
  if (!(v >= 0.0) || v > 4294967295.0 || v != std::floor(v)) {
    throw FormatError("PLY face index is not a valid unsigned integer");
  }
  return static_cast<std::uint32_t>(v);
}

}  // namespace

TriangleMesh load_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");

  std::string line;
  std::getline(in, line);
  if (line != "ply" && line != "ply\r") throw FormatError("'" + path.string() + "' is not a PLY file");

  std::optional<PlyFormat> format;
  std::vector<PlyElement> elements;
  bool header_done = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw.empty() || kw == "comment" || kw == "obj_info") continue;
    if (kw == "format") {
      std::string f;
      ls >> f;
      if (f == "ascii") format = PlyFormat::Ascii;
      else if (f == "binary_little_endian") format = PlyFormat::BinaryLE;
      else if (f == "binary_big_endian") format = PlyFormat::BinaryBE;
      else throw FormatError("unknown PLY format '" + f + "'");
    } else if (kw == "element") {
      PlyElement e;
      long long count = -1;
      if (!(ls >> e.name >> count) || count < 0) throw FormatError("malformed PLY element line");
      e.count = static_cast<std::size_t>(count);
      elements.push_back(std::move(e));
    } else if (kw == "property") {
      if (elements.empty()) throw FormatError("PLY property before any element");
      PlyProperty p;
      std::string t;
      ls >> t;
      if (t == "list") {
        std::string ct, it;
        ls >> ct >> it >> p.name;
        auto c = parse_type(ct), i = parse_type(it);
        if (!c || !i || p.name.empty()) throw FormatError("malformed PLY list property");
        p.is_list = true;
        p.count_type = *c;
        p.type = *i;
      } else {
        auto ty = parse_type(t);
        ls >> p.name;
        if (!ty || p.name.empty()) throw FormatError("malformed PLY property '" + line + "'");
        p.type = *ty;
      }
      elements.back().props.push_back(std::move(p));
    } else if (kw == "end_header") {
      header_done = true;
      break;
    } else {
      throw FormatError("unexpected PLY header line '" + line + "'");
    }
  }
  if (!header_done || !format) throw FormatError("PLY header incomplete");

  TriangleMesh mesh;
  ValueReader reader(in, *format);
  for (const auto& e : elements) {
    int ix = -1, iy = -1, iz = -1, iface = -1;
    for (std::size_t k = 0; k < e.props.size(); ++k) {
      const auto& p = e.props[k];
      if (e.name == "vertex" && !p.is_list) {
        if (p.name == "x") ix = static_cast<int>(k);
        if (p.name == "y") iy = static_cast<int>(k);
        if (p.name == "z") iz = static_cast<int>(k);
      }
      if (e.name == "face" && p.is_list && iface < 0) iface = static_cast<int>(k);
    }
    if (e.name == "vertex" && (ix < 0 || iy < 0 || iz < 0)) {
      throw FormatError("PLY vertex element lacks x/y/z");
    }

    std::vector<std::uint32_t> poly;
    for (std::size_t r = 0; r < e.count; ++r) {
      Eigen::Vector3d v = Eigen::Vector3d::Zero();
      for (std::size_t k = 0; k < e.props.size(); ++k) {
        const auto& p = e.props[k];
        if (p.is_list) {
          const double cnt = reader.read(p.count_type);
          if (!(cnt >= 0.0) || cnt > 1e6) throw FormatError("PLY list length invalid");
          const auto n = static_cast<std::size_t>(cnt);
          poly.clear();
          for (std::size_t q = 0; q < n; ++q) poly.push_back(to_index(reader.read(p.type)));
          if (static_cast<int>(k) == iface) {
            for (std::size_t q = 1; q + 1 < poly.size(); ++q) {
              mesh.faces.push_back({poly[0], poly[q], poly[q + 1]});
            }
          }
        } else {
          const double val = reader.read(p.type);
          if (static_cast<int>(k) == ix) v.x() = val;
          if (static_cast<int>(k) == iy) v.y() = val;
          if (static_cast<int>(k) == iz) v.z() = val;
        }
      }
      if (e.name == "vertex") mesh.vertices.push_back(v);
    }
  }
  try {
    mesh.validate();
  } catch (const InvalidArgument& err) {
    throw FormatError(std::string("PLY mesh invalid: ") + err.what());
  }
  return mesh;
}

void save_ply(const TriangleMesh& mesh, const std::filesystem::path& path) {
  mesh.validate();
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  std::fprintf(f, "ply\nformat ascii 1.0\nelement vertex %zu\n", mesh.vertices.size());
  std::fprintf(f, "property double x\nproperty double y\nproperty double z\n");
  std::fprintf(f, "element face %zu\nproperty list uchar uint vertex_indices\nend_header\n",
               mesh.faces.size());
  for (const auto& v : mesh.vertices) std::fprintf(f, "%.17g %.17g %.17g\n", v.x(), v.y(), v.z());
  for (const auto& fc : mesh.faces) std::fprintf(f, "3 %u %u %u\n", fc[0], fc[1], fc[2]);
  const bool ok = std::ferror(f) == 0;
  std::fclose(f);
  if (!ok) throw IoError("failed while writing '" + path.string() + "'");
}

}  // namespace satrecon
