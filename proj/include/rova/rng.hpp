#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

namespace rova {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// FNV-1a over bytes; used to turn stream names into keys.
constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

/// Derives a child key from a parent key and a list of tags. Order matters.
std::uint64_t derive_key(std::uint64_t parent,
                         std::initializer_list<std::uint64_t> tags) noexcept;

/// Counter-based generator: the i-th draw of a stream is
/// mix64(key ^ mix64(i)), so any draw can be recomputed from (key, i)
/// without replaying the stream. All arithmetic is integer; output is
/// identical on every platform.
///
/// Streams are split with `split(tag...)`, which yields an independent
/// generator keyed on (key, tags). The corruption module splits per
/// (style, purpose, frame).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t position() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept { return at(counter_++); }
  std::uint64_t at(std::uint64_t index) const noexcept {
    return mix64(key_ ^ mix64(index));
  }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

  /// Uniform integer in [0, n). Multiply-high reduction; n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  CounterRng split(std::initializer_list<std::uint64_t> tags) const noexcept {
    return CounterRng(derive_key(key_, tags));
  }
  CounterRng split(std::string_view name) const noexcept {
    return CounterRng(derive_key(key_, {fnv1a(name)}));
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Uniform random permutation of {0..n-1} (Fisher-Yates on CounterRng).
std::vector<int> random_permutation(int n, CounterRng& rng);

}  // namespace rova
