#include "qaaug/random.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <stdexcept>
#include <unordered_set>

namespace qaaug {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_seed(std::uint64_t seed, std::string_view key) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : key) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return mix64(h ^ mix64(seed));
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
  // Reject the top partial bucket so every residue is equally likely.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

std::vector<std::size_t> Rng::sample_indices(std::size_t population, std::size_t count) {
  if (count > population) throw std::invalid_argument("Rng::sample_indices: count exceeds population");
  std::vector<std::size_t> picked;
  picked.reserve(count);
  if (count * 2 >= population) {
    std::vector<std::size_t> all(population);
    for (std::size_t i = 0; i < population; ++i) all[i] = i;
    // Partial Fisher-Yates over the first `count` slots.
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t j = i + static_cast<std::size_t>(below(population - i));
      std::swap(all[i], all[j]);
    }
    picked.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
  } else {
    // Floyd's algorithm.
    std::unordered_set<std::size_t> seen;
    for (std::size_t j = population - count; j < population; ++j) {
      std::size_t t = static_cast<std::size_t>(below(j + 1));
      if (!seen.insert(t).second) {
        seen.insert(j);
        picked.push_back(j);
      } else {
        picked.push_back(t);
      }
    }
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0x0F]);
  }
  return out;
}

}  // namespace qaaug
