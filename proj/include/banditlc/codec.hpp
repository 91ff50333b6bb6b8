#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "banditlc/model.hpp"

namespace banditlc {

inline constexpr std::uint64_t kDefaultJMax = 1u << 20;

// Lazily generated codebook: codeword j is a pure function of
// (seed, t, action, j), so encoder and decoder regenerate identical
// codewords from the shared seed and never store the codebook.
class CodebookStream {
 public:
  CodebookStream(const ReconDistribution& recon, std::uint64_t seed, std::uint64_t t,
                 std::uint64_t action)
      : recon_(&recon), seed_(seed), t_(t), action_(action) {}

  Symbol at(std::uint64_t j) const {  // 1-based index
    RngStream rng = codeword_stream(seed_, t_, action_, j);
    return recon_->sample(rng);
  }

  const ReconDistribution& recon() const { return *recon_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t round() const { return t_; }
  std::uint64_t action() const { return action_; }

 private:
  const ReconDistribution* recon_;
  std::uint64_t seed_, t_, action_;
};

// Outcome of one encoding round. `bits` is the idealized cost log2(J)
// driving all bandit statistics; the emitted frame length is tracked
// separately because prefix-free coding adds O(log log J).
struct MatchResult {
  std::uint64_t index = 0;  // first d-match, 0 when escaped
  double bits = 0.0;        // log2(index), or the escape cost
  Symbol reconstruction = 0;
  bool escaped = false;
};

// Smallest j <= j_max with rho(x, y(j)) <= d. When none exists the round
// escapes: cost log2(j_max) + ceil(log2 |X|) + 1 (flag bit + raw symbol)
// and the reconstruction carries x itself.
MatchResult first_match(Symbol x, const CodebookStream& stream, const DistortionSpec& spec,
                        std::uint64_t j_max);

double escape_cost_bits(std::uint64_t j_max, int raw_symbol_bits);

// Bits needed for a raw description of x in 0..|X|-1; |X| given via the
// spec so saturated sizes (very long vectors) stay exact.
int raw_symbol_bits(const DistortionSpec& spec);

// MSB-first bit packing; frames are padded with zero bits to a byte edge.
class BitWriter {
 public:
  void put(bool bit);
  void put_bits(std::uint64_t value, int width);  // MSB first
  std::vector<std::uint8_t> finish();             // pads to byte
  std::size_t bit_count() const { return bit_count_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bit_count_ = 0;
};

class BitReader {
 public:
  explicit BitReader(const std::vector<std::uint8_t>& bytes) : bytes_(&bytes) {}
  bool get();
  std::uint64_t get_bits(int width);

 private:
  const std::vector<std::uint8_t>* bytes_;
  std::size_t pos_ = 0;
};

void elias_delta_encode(BitWriter& w, std::uint64_t value);  // value >= 1
std::uint64_t elias_delta_decode(BitReader& r);

// Frame format, MSB first: [flag 0][Elias-delta(J)] or [flag 1][raw x],
// zero-padded to a byte edge.
struct EncodedFrame {
  std::vector<std::uint8_t> bytes;
  std::size_t bit_count = 0;  // bits before padding
};

struct CodecConfig {
  std::uint64_t seed = 0;
  std::uint64_t j_max = kDefaultJMax;
};

std::pair<MatchResult, EncodedFrame> encode_round(Symbol x, const ReconDistribution& q,
                                                  std::uint64_t action, std::uint64_t t,
                                                  const DistortionSpec& spec,
                                                  const CodecConfig& cfg);

Symbol decode_round(const EncodedFrame& frame, const ReconDistribution& q, std::uint64_t action,
                    std::uint64_t t, const DistortionSpec& spec, const CodecConfig& cfg);

}  // namespace banditlc
