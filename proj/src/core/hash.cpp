#include "gprlab/core/hash.hpp"

#include "gprlab/core/error.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>

namespace gprlab {

std::string sha256_hex(std::span<const std::byte> bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
    fail(ErrorCode::io_error, "SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(length * 2);
  char buf[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string sha256_hex(std::string_view text) {
  return sha256_hex(std::as_bytes(std::span(text.data(), text.size())));
}

std::string image_hash(const RadarImage& image) {
  const auto* p = reinterpret_cast<const std::byte*>(image.pixels.data());
  return sha256_hex(std::span(p, static_cast<std::size_t>(image.pixels.size()) * sizeof(float)));
}

}  // namespace gprlab
