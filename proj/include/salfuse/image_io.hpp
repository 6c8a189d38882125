#pragma once

#include <filesystem>

#include "salfuse/imaging.hpp"

namespace salfuse {

// 8-bit PNG and binary PNM (P5 gray, P6 RGB) codecs. Samples map to [0,1]
// by /255 on read and by round(v*255) on write. PNG alpha is dropped and
// palettes / 16-bit samples are reduced to 8-bit gray or RGB.

bool is_supported_image(const std::filesystem::path& path);

RasterImage read_image(const std::filesystem::path& path);

// Format follows the extension: .png, .pgm/.ppm/.pnm. A 3-channel image
// written to .pgm is stored as its luminance.
void write_image(const std::filesystem::path& path, const RasterImage& img);

void write_map(const std::filesystem::path& path, const GrayMap& map);

}  // namespace salfuse
