// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#include "satrecon/raster_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "satrecon/error.hpp"

namespace satrecon {
namespace {

constexpr char kMagic[] = "SRTK1\n";
constexpr std::size_t kMagicLen = 6;
constexpr std::size_t kMaxHeaderLen = 256;

std::uint32_t byteswap32(std::uint32_t v) {
  return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
}

std::string format_nodata(float v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
  return buf;
}

}  // namespace

void write_raster(const Raster& raster, std::ostream& out) {
  out.write(kMagic, kMagicLen);
  out << raster.width() << ' ' << raster.height() << ' ' << raster.channels() << ' '
      << format_nodata(raster.nodata()) << '\n';

  const auto samples = raster.samples();
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(samples.data()),
              static_cast<std::streamsize>(samples.size() * sizeof(float)));
  } else {
    for (float v : samples) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      bits = byteswap32(bits);
      out.write(reinterpret_cast<const char*>(&bits), 4);
    }
  }
  if (!out) throw IoError("failed while writing raster payload");
}

Raster read_raster(std::istream& in) {
  char magic[kMagicLen];
  in.read(magic, kMagicLen);
  if (in.gcount() != static_cast<std::streamsize>(kMagicLen) ||
      std::memcmp(magic, kMagic, kMagicLen) != 0) {
    throw FormatError("not a raster file (bad magic)");
  }

  std::string header;
  char ch;
  while (in.get(ch) && ch != '\n') {
    header.push_back(ch);
    if (header.size() > kMaxHeaderLen) throw FormatError("raster header line too long");
  }
  if (!in) throw FormatError("raster header is not terminated");

  std::istringstream hs(header);
  long long width = -1, height = -1, channels = -1;
  std::string nodata_tok, extra;
  if (!(hs >> width >> height >> channels >> nodata_tok) || (hs >> extra)) {
    throw FormatError("malformed raster header: '" + header + "'");
  }
  if (width < 0 || height < 0 || channels < 1 || channels > 4 || width > (1 << 20) ||
      height > (1 << 20)) {
    throw FormatError("raster header has invalid dimensions: '" + header + "'");
  }
  char* end = nullptr;
  const float nodata = std::strtof(nodata_tok.c_str(), &end);
  if (end == nodata_tok.c_str() || *end != '\0') {
    throw FormatError("raster header has an unparsable nodata value '" + nodata_tok + "'");
  }

  const std::size_t count = static_cast<std::size_t>(width) * height * channels;
  std::vector<float> samples(count);
  in.read(reinterpret_cast<char*>(samples.data()), static_cast<std::streamsize>(count * 4));
  if (static_cast<std::size_t>(in.gcount()) != count * 4) {
    throw FormatError("raster payload truncated: expected " + std::to_string(count * 4) +
                      " bytes, got " + std::to_string(in.gcount()));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("raster payload longer than its header declares");
  }
  if constexpr (std::endian::native != std::endian::little) {
    for (auto& v : samples) {
      std::uint32_t bits;
      std::memcpy(&bits, &v, 4);
      bits = byteswap32(bits);
      std::memcpy(&v, &bits, 4);
    }
  }

  try {
    return Raster(static_cast<int>(width), static_cast<int>(height), static_cast<int>(channels),
                  std::move(samples), nodata);
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("raster payload rejected: ") + e.what());
  }
}

void save_raster(const Raster& raster, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_raster(raster, out);
}

Raster load_raster(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_raster(in);
}

}  // namespace satrecon
