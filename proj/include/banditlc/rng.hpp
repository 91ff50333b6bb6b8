#pragma once

#include <cstdint>
#include <initializer_list>

namespace banditlc {

// 64-bit avalanche (splitmix64 finalizer).
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

// Folds a tuple of integers into a single stream key. Used to derive
// independent streams from (seed, tag, round, action, index) tuples.
inline std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t k = 0x8e8c2f7315817f1bull;
  for (std::uint64_t p : parts) {
    k = mix64(k + 0x9e3779b97f4a7c15ull + p);
  }
  return k;
}

// Counter-based generator: the output sequence is a pure function of the
// key, so any stream can be replayed from its key alone. Encoder/decoder
// synchronization relies on this.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : counter_(key) {}

  std::uint64_t next_u64() {
    counter_ += 0x9e3779b97f4a7c15ull;
    return mix64(counter_);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n). Rejection-free modulo is fine at simulation scale,
  // but use rejection to keep exact uniformity for the permutation sampler.
  std::uint64_t next_below(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

 private:
  std::uint64_t counter_;
};

// Stream domain tags. Distinct tags keep source draws, codebook draws and
// auxiliary test streams independent under a shared run seed.
namespace stream_tag {
inline constexpr std::uint64_t kSource = 0x01;
inline constexpr std::uint64_t kCodebook = 0x02;
inline constexpr std::uint64_t kAux = 0x03;
}  // namespace stream_tag

inline RngStream source_stream(std::uint64_t seed, std::uint64_t t) {
  return RngStream(derive_key({seed, stream_tag::kSource, t}));
}

// One stream per codeword: (seed, t, action, j) -> codeword is pure.
inline RngStream codeword_stream(std::uint64_t seed, std::uint64_t t,
                                 std::uint64_t action, std::uint64_t j) {
  return RngStream(derive_key({seed, stream_tag::kCodebook, t, action, j}));
}

}  // namespace banditlc
