#pragma once

#include <cstdint>
#include <string_view>

namespace lid {

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

// FNV-1a over raw bytes. Used for feature hashing, dataset checksums and
// the model-file content checksum; must stay bit-stable across platforms.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t state = kFnvOffsetBasis) {
  for (unsigned char b : bytes) {
    state ^= b;
    state *= kFnvPrime;
  }
  return state;
}

// Incremental form for hashing a logical string without materializing it.
class Fnv1a {
 public:
  void update(std::string_view bytes) { state_ = fnv1a64(bytes, state_); }
  void update(char c) {
    state_ ^= static_cast<unsigned char>(c);
    state_ *= kFnvPrime;
  }
  std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = kFnvOffsetBasis;
};

// Finalizer with good avalanche, used to derive per-key uniform variates
// (lexicon dropout) from FNV digests.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Top 53 bits mapped onto [0, 1).
constexpr double unit_interval(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace lid
