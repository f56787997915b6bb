#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "gprlab/core/bscan.hpp"

namespace gprlab {

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::span<const std::byte> bytes);
std::string sha256_hex(std::string_view text);

/// Digest of an image's float32 pixel bytes (little-endian, row-major);
/// two images hash equal iff their pixels are bit-identical.
std::string image_hash(const RadarImage& image);

}  // namespace gprlab
