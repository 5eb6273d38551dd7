#pragma once

#include <string>

#include "core/image.hpp"

namespace sogtrack {

// 8-bit PNG loaders/writers; any input layout is expanded to RGB on read.
ImageRGB read_png(const std::string& path);
void write_png(const std::string& path, const ImageRGB& image);

// Masks are single-channel PNGs; any nonzero pixel is foreground.
Mask read_mask_png(const std::string& path);
void write_mask_png(const std::string& path, const Mask& mask);

}  // namespace sogtrack
