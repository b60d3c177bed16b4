#ifndef ELPROC_IMAGE_IO_HPP
#define ELPROC_IMAGE_IO_HPP

#include <string>

#include "elproc/image.hpp"

namespace elproc {

enum class ImageFormat { kAuto, kPgm, kPgmAscii, kPng, kJpeg };

// Load a PGM (P2/P5), PNG (8/16-bit gray, color converted to luma) or JPEG
// (read-only, decoded as grayscale) raster. Pixel values are in
// [0, 255] for 8-bit sources and [0, 65535] for 16-bit.
GrayImage load_image(const std::string& path);

// Save as PGM or PNG. Values already inside [0, max_value] are rounded;
// anything else (e.g. a standardized image) is affinely rescaled so the
// minimum maps to 0 and the maximum to max_value. bit_depth is 8 or 16.
// JPEG output is intentionally unsupported: outputs stay lossless.
void save_image(const GrayImage& img, const std::string& path,
                ImageFormat format = ImageFormat::kAuto, int bit_depth = 8);

// Binary images serialize as PBM (P4) or as PNG with {0, 255} pixels.
void save_binary(const BinaryImage& img, const std::string& path);
BinaryImage load_binary(const std::string& path);

}  // namespace elproc

#endif
