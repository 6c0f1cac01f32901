// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>

#include "satrecon/raster.hpp"

namespace satrecon {

// Raster file layout:
//   "SRTK1\n"
//   "<width> <height> <channels> <nodata>\n"      (ASCII)
//   width*height*channels little-endian float32, row-major, interleaved
//
// Sample bit patterns (including NaN payloads) are preserved exactly.

void write_raster(const Raster& raster, std::ostream& out);
Raster read_raster(std::istream& in);

void save_raster(const Raster& raster, const std::filesystem::path& path);
Raster load_raster(const std::filesystem::path& path);

}  // namespace satrecon
