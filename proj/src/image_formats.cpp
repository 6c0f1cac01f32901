// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#include "satrecon/image_formats.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "satrecon/error.hpp"

namespace satrecon {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  return f;
}

}  // namespace

void save_png(const Raster& raster, const std::filesystem::path& path) {
  int color_type = 0;
  switch (raster.channels()) {
    case 1: color_type = PNG_COLOR_TYPE_GRAY; break;
    case 2: color_type = PNG_COLOR_TYPE_GRAY_ALPHA; break;
    case 3: color_type = PNG_COLOR_TYPE_RGB; break;
    case 4: color_type = PNG_COLOR_TYPE_RGB_ALPHA; break;
    default: throw InvalidArgument("unsupported channel count for PNG");
  }
  if (raster.width() == 0 || raster.height() == 0) throw InvalidArgument("cannot write an empty PNG");

  const int w = raster.width();
  const int h = raster.height();
  const int nc = raster.channels();
  std::vector<png_byte> pixels(static_cast<std::size_t>(w) * h * nc);
  const auto src = raster.samples();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const float v = src[i];
    pixels[i] = raster.is_nodata(v)
                    ? 0
                    : static_cast<png_byte>(std::clamp(std::floor(v + 0.5f), 0.0f, 255.0f));
  }

  FilePtr fp = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng failed while writing '" + path.string() + "'");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, w, h, 8, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < h; ++y) png_write_row(png, &pixels[static_cast<std::size_t>(y) * w * nc]);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Raster load_png(const std::filesystem::path& path) {
  FilePtr fp = open_file(path, "rb");
  png_byte sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError("'" + path.string() + "' is not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialisation failed");
  }
  std::vector<png_byte> pixels;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("libpng failed while reading '" + path.string() + "'");
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  png_set_strip_16(png);
  png_set_packing(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_read_update_info(png, info);

  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  const int nc = png_get_channels(png, info);
  pixels.resize(static_cast<std::size_t>(w) * h * nc);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y) rows[y] = &pixels[static_cast<std::size_t>(y) * w * nc];
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  std::vector<float> samples(pixels.begin(), pixels.end());
  return Raster(w, h, nc, std::move(samples));
}

// ---------------------------------------------------------------------------

void save_pfm(const Raster& raster, const std::filesystem::path& path) {
  if (raster.channels() != 1 && raster.channels() != 3) {
    throw InvalidArgument("PFM supports 1 or 3 channels");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const bool little = std::endian::native == std::endian::little;
  out << (raster.channels() == 1 ? "Pf" : "PF") << '\n'
      << raster.width() << ' ' << raster.height() << '\n'
      << (little ? "-1.0" : "1.0") << '\n';
  const std::size_t row_len = static_cast<std::size_t>(raster.width()) * raster.channels();
  const auto samples = raster.samples();
  for (int y = raster.height() - 1; y >= 0; --y) {
    out.write(reinterpret_cast<const char*>(samples.data() + y * row_len),
              static_cast<std::streamsize>(row_len * sizeof(float)));
  }
  if (!out) throw IoError("failed while writing '" + path.string() + "'");
}

Raster load_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string kind;
  long long w = -1, h = -1;
  double scale = 0.0;
  if (!(in >> kind >> w >> h >> scale) || (kind != "Pf" && kind != "PF") || w <= 0 || h <= 0 ||
      scale == 0.0) {
    throw FormatError("malformed PFM header in '" + path.string() + "'");
  }
  in.get();  // single whitespace before the payload
  const int nc = kind == "PF" ? 3 : 1;
  const std::size_t row_len = static_cast<std::size_t>(w) * nc;
  std::vector<float> samples(row_len * h);
  const bool swap = (scale < 0) != (std::endian::native == std::endian::little);
  for (long long y = h - 1; y >= 0; --y) {
    float* row = samples.data() + y * row_len;
    in.read(reinterpret_cast<char*>(row), static_cast<std::streamsize>(row_len * 4));
    if (static_cast<std::size_t>(in.gcount()) != row_len * 4) {
      throw FormatError("PFM payload truncated in '" + path.string() + "'");
    }
    if (swap) {
      for (std::size_t i = 0; i < row_len; ++i) {
        std::uint32_t b;
        std::memcpy(&b, &row[i], 4);
        b = ((b & 0xFFu) << 24) | ((b & 0xFF00u) << 8) | ((b >> 8) & 0xFF00u) | (b >> 24);
        std::memcpy(&row[i], &b, 4);
      }
    }
  }
  // External tools mark invalid depth with inf or 0-sized holes; map
  // non-finite samples to nodata.
  for (auto& v : samples)
    if (!std::isfinite(v)) v = kNoData;
  return Raster(static_cast<int>(w), static_cast<int>(h), nc, std::move(samples));
}

}  // namespace satrecon
