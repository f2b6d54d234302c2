#pragma once

#include <cstdint>
#include <string>

namespace pcm {

// FNV-1a 64-bit; used for manifests, cache keys and determinism checks.
struct Fnv1a {
  std::uint64_t state = 0xcbf29ce484222325ULL;

  void update(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      state ^= p[i];
      state *= 0x100000001b3ULL;
    }
  }

  void update(const std::string& s) { update(s.data(), s.size()); }

  template <typename T>
  void update_value(const T& v) {
    update(&v, sizeof(T));
  }

  std::uint64_t digest() const { return state; }
};

std::string hex64(std::uint64_t v);
std::uint64_t hash_file(const std::string& path);  // throws if unreadable

}  // namespace pcm
