// Copyright Contributors to the satrecon project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "satrecon/raster.hpp"

namespace satrecon {

/// 8-bit PNG, gray (1 channel), RGB (3) or RGBA (4). Samples are rounded and
/// clamped to [0, 255]; nodata is written as 0.
void save_png(const Raster& raster, const std::filesystem::path& path);
/// Loads an 8-bit PNG into a float raster with values 0..255 (palette and
/// 16-bit inputs are converted to 8-bit gray/RGB/RGBA first).
Raster load_png(const std::filesystem::path& path);

/// Portable float map ("Pf" gray or "PF" RGB). Rows in the file run bottom to
/// top; the scale sign selects endianness. Only the sign of the scale is
/// honoured: values are stored unscaled.
void save_pfm(const Raster& raster, const std::filesystem::path& path);
Raster load_pfm(const std::filesystem::path& path);

}  // namespace satrecon
