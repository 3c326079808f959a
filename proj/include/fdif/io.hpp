#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdif/image.hpp"

namespace fdif {

/// Data-level failure (unreadable file, bad format, shape mismatch);
/// the CLI maps it to exit code 2.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 8-bit grayscale grid as stored on disk.
struct RawImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
};

/// Reads PGM (P5) or PNG. Color PNG is converted to luminance
/// 0.299 R + 0.587 G + 0.114 B; 16-bit inputs are rejected with a
/// diagnostic naming the file. Values are scaled to [0,1].
Image read_image(const std::string& path);

/// round(value * 255) quantization; format chosen by extension (.pgm / .png).
void write_image(const Image& img, const std::string& path);

RawImage quantize(const Image& img);
Image from_raw(const RawImage& raw);

BinaryMap to_binary(const Image& img, double t = 0.5);
Image from_binary(const BinaryMap& map);

}  // namespace fdif
