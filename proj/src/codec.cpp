#include "banditlc/codec.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace banditlc {

MatchResult first_match(Symbol x, const CodebookStream& stream, const DistortionSpec& spec,
                        std::uint64_t j_max) {
  if (j_max < 1) throw std::invalid_argument("first_match: j_max must be positive");
  for (std::uint64_t j = 1; j <= j_max; ++j) {
    const Symbol y = stream.at(j);
    if (spec.within(x, y)) {
      return MatchResult{j, std::log2(static_cast<double>(j)), y, false};
    }
  }
  MatchResult r;
  r.escaped = true;
  r.bits = escape_cost_bits(j_max, raw_symbol_bits(spec));
  r.reconstruction = x;  // raw description stands in for the reconstruction
  return r;
}

double escape_cost_bits(std::uint64_t j_max, int raw_bits) {
  return std::log2(static_cast<double>(j_max)) + raw_bits + 1.0;
}

int raw_symbol_bits(const DistortionSpec& spec) {
  const std::uint64_t n = spec.x_size();
  if (n != UINT64_MAX || !spec.additive_form()) {
    return n <= 1 ? 0 : static_cast<int>(std::bit_width(n - 1));
  }
  // |X| = u^l saturated past 64 bits: ceil(l * log2 u)
  return static_cast<int>(std::ceil(spec.length() * std::log2(spec.u_size()) - 1e-9));
}

void BitWriter::put(bool bit) {
  const std::size_t byte = bit_count_ / 8;
  if (byte == bytes_.size()) bytes_.push_back(0);
  if (bit) bytes_[byte] |= static_cast<std::uint8_t>(0x80u >> (bit_count_ % 8));
  ++bit_count_;
}

void BitWriter::put_bits(std::uint64_t value, int width) {
  for (int i = width - 1; i >= 0; --i) put((value >> i) & 1u);
}

std::vector<std::uint8_t> BitWriter::finish() { return std::move(bytes_); }

bool BitReader::get() {
  const std::size_t byte = pos_ / 8;
  if (byte >= bytes_->size()) throw std::out_of_range("BitReader: past end of frame");
  const bool bit = ((*bytes_)[byte] >> (7 - pos_ % 8)) & 1u;
  ++pos_;
  return bit;
}

std::uint64_t BitReader::get_bits(int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v = (v << 1) | (get() ? 1u : 0u);
  return v;
}

void elias_delta_encode(BitWriter& w, std::uint64_t value) {
  if (value < 1) throw std::invalid_argument("elias_delta_encode: value must be >= 1");
  const int n = static_cast<int>(std::bit_width(value));  // value has n bits
  const int l = static_cast<int>(std::bit_width(static_cast<std::uint64_t>(n)));
  for (int i = 0; i < l - 1; ++i) w.put(false);
  w.put_bits(static_cast<std::uint64_t>(n), l);
  // low n-1 bits of value (the leading 1 is implicit)
  if (n > 1) w.put_bits(value & ((std::uint64_t{1} << (n - 1)) - 1), n - 1);
}

std::uint64_t elias_delta_decode(BitReader& r) {
  int zeros = 0;
  while (!r.get()) ++zeros;
  std::uint64_t n = 1;
  for (int i = 0; i < zeros; ++i) n = (n << 1) | (r.get() ? 1u : 0u);
  std::uint64_t value = 1;
  for (std::uint64_t i = 1; i < n; ++i) value = (value << 1) | (r.get() ? 1u : 0u);
  return value;
}

std::pair<MatchResult, EncodedFrame> encode_round(Symbol x, const ReconDistribution& q,
                                                  std::uint64_t action, std::uint64_t t,
                                                  const DistortionSpec& spec,
                                                  const CodecConfig& cfg) {
  CodebookStream stream(q, cfg.seed, t, action);
  MatchResult m = first_match(x, stream, spec, cfg.j_max);
  BitWriter w;
  if (m.escaped) {
    w.put(true);
    w.put_bits(x, raw_symbol_bits(spec));
  } else {
    w.put(false);
    elias_delta_encode(w, m.index);
  }
  EncodedFrame frame;
  frame.bit_count = w.bit_count();
  frame.bytes = w.finish();
  return {m, frame};
}

Symbol decode_round(const EncodedFrame& frame, const ReconDistribution& q, std::uint64_t action,
                    std::uint64_t t, const DistortionSpec& spec, const CodecConfig& cfg) {
  BitReader r(frame.bytes);
  if (r.get()) {
    return r.get_bits(raw_symbol_bits(spec));
  }
  const std::uint64_t j = elias_delta_decode(r);
  if (j > cfg.j_max) throw std::invalid_argument("decode_round: index exceeds j_max");
  CodebookStream stream(q, cfg.seed, t, action);
  return stream.at(j);
}

}  // namespace banditlc
