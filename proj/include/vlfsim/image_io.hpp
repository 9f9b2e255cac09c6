#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>

#include "vlfsim/image.hpp"

namespace vlfsim {

// Portable rasters: PPM/PGM (P2, P3, P5, P6; maxval up to 65535) and
// farbfeld (alpha dropped). Values are scaled to [0, 1]. DataError on any
// malformed or truncated input.
Image decode_raster(std::span<const std::byte> bytes);
Image read_image(const std::filesystem::path& path);

// Binary PPM (P6, 1 or 3 channels -> P5/P6), 8-bit, values clamped to [0, 1].
std::string encode_ppm(const Image& image);
void write_ppm(const std::filesystem::path& path, const Image& image);

}  // namespace vlfsim
