#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace qaaug {

/// 64-bit mixer from SplitMix64.
std::uint64_t mix64(std::uint64_t x);

/// FNV-1a over bytes, then mixed with `seed`. Stable across platforms.
std::uint64_t hash_seed(std::uint64_t seed, std::string_view key);

/// Seeded generator whose draws are identical on every standard library.
/// std::uniform_int_distribution is implementation-defined, so bounded
/// draws are done here by rejection.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  /// `count` distinct indices from [0, population), ascending.
  std::vector<std::size_t> sample_indices(std::size_t population, std::size_t count);

 private:
  std::mt19937_64 engine_;
};

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

}  // namespace qaaug
