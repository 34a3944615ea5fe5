#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace panosr {

// FNV-1a 64-bit. Used to fingerprint parameter blocks and output files.
inline std::uint64_t fnv1a(const void* bytes, std::size_t n,
                           std::uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v);

// Hash of a file's raw bytes; throws on I/O failure.
std::uint64_t hash_file(const std::string& path);

}  // namespace panosr
