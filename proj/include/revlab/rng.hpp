#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace revlab {

// Deterministic 64-bit generator (SplitMix64). Used instead of <random>
// engines + distributions because distribution output is implementation
// defined and results here must be byte-identical across toolchains.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound) by rejection; bound must be > 0.
  uint64_t bounded(uint64_t bound) {
    uint64_t threshold = (0ULL - bound) % bound;
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool coin(double probability) { return next_double() < probability; }

 private:
  uint64_t state_;
};

inline uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Per-sample stream: mixes the run seed with the sample id so each sample's
// randomness is independent of corpus order.
inline SplitMix64 derive_rng(uint64_t seed, std::string_view sample_id) {
  SplitMix64 mixer(seed ^ fnv1a64(sample_id));
  mixer.next();
  return mixer;
}

template <typename T>
void shuffle(std::vector<T>& items, SplitMix64& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng.bounded(i));
    std::swap(items[i - 1], items[j]);
  }
}

// First k indices of a Fisher-Yates shuffle of [0, n): a uniform sample
// without replacement, order discarded by sorting at the call site if needed.
inline std::vector<size_t> sample_without_replacement(size_t n, size_t k, SplitMix64& rng) {
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  if (k > n) k = n;
  for (size_t i = 0; i < k; ++i) {
    size_t j = i + static_cast<size_t>(rng.bounded(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace revlab
