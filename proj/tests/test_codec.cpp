#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "banditlc/codec.hpp"

using namespace banditlc;

namespace {
const DistortionSpec kS0Spec = DistortionSpec::hamming(2, 0.0);
const DistortionSpec kS1Spec = DistortionSpec::additive_hamming(2, 4, 1.0);
const ReconDistribution kFair = ReconDistribution::categorical({0.5, 0.5});
}  // namespace

TEST_CASE("first match scans to the smallest matching index") {
  // find a stream whose first two codewords are (1, 0): then x=0 matches at 2
  for (std::uint64_t seed = 0;; ++seed) {
    REQUIRE(seed < 1000);
    CodebookStream stream(kFair, seed, 1, 0);
    if (stream.at(1) == 1 && stream.at(2) == 0) {
      const MatchResult m = first_match(0, stream, kS0Spec, 1u << 16);
      CHECK(m.index == 2);
      CHECK(m.bits == doctest::Approx(1.0));
      CHECK(m.reconstruction == 0);
      CHECK_FALSE(m.escaped);
      // the same stream matches x=1 at index 1 with zero idealized bits
      const MatchResult m1 = first_match(1, stream, kS0Spec, 1u << 16);
      CHECK(m1.index == 1);
      CHECK(m1.bits == 0.0);
      break;
    }
  }
}

TEST_CASE("elias delta round-trips and delta(1) is a single bit") {
  {
    BitWriter w;
    elias_delta_encode(w, 1);
    CHECK(w.bit_count() == 1);
    const auto bytes = w.finish();
    BitReader r(bytes);
    CHECK(elias_delta_decode(r) == 1);
  }
  for (std::uint64_t j : {2ull, 3ull, 4ull, 17ull, 100ull, 4095ull, 1048576ull}) {
    BitWriter w;
    elias_delta_encode(w, j);
    const auto bytes = w.finish();
    BitReader r(bytes);
    CHECK(elias_delta_decode(r) == j);
  }
}

TEST_CASE("encode_round frames: J=1 is two emitted bits with zero idealized cost") {
  // look for a round where the first codeword already matches x=0
  const CodecConfig cfg{123456, 1u << 16};
  for (std::uint64_t t = 1;; ++t) {
    REQUIRE(t < 1000);
    CodebookStream stream(kFair, cfg.seed, t, 0);
    if (stream.at(1) == 0) {
      auto [m, frame] = encode_round(0, kFair, 0, t, kS0Spec, cfg);
      CHECK(m.index == 1);
      CHECK(m.bits == 0.0);
      CHECK(frame.bit_count == 2);  // flag + delta(1)
      CHECK(decode_round(frame, kFair, 0, t, kS0Spec, cfg) == 0);
      break;
    }
  }
}

TEST_CASE("escape: frame is flag plus raw symbol, cost matches the formula") {
  // Q puts all mass on symbol 1, x = 0 never matches at d = 0
  const auto q = ReconDistribution::categorical({0.0, 1.0});
  const CodecConfig cfg{7, 1u << 16};
  auto [m, frame] = encode_round(0, q, 0, 1, kS0Spec, cfg);
  CHECK(m.escaped);
  CHECK(m.bits == doctest::Approx(16.0 + 1.0 + 1.0));
  CHECK(m.reconstruction == 0);           // raw x
  CHECK(frame.bit_count == 2);            // flag bit + 1 raw bit for |X| = 2
  CHECK(decode_round(frame, q, 0, 1, kS0Spec, cfg) == 0);
}

TEST_CASE("escape probability at small j_max matches (1-p)^j_max") {
  const CodecConfig cfg{2024, 3};
  int escapes = 0;
  const int n = 10000;
  for (int t = 1; t <= n; ++t) {
    CodebookStream stream(kFair, cfg.seed, t, 0);
    escapes += first_match(0, stream, kS0Spec, cfg.j_max).escaped ? 1 : 0;
  }
  CHECK(std::abs(escapes / double(n) - 0.125) < 0.01);
}

TEST_CASE("geometric law of the first match index") {
  // mean of J should be 1/p within 2%
  const CodecConfig cfg{555, 1u << 20};
  double sum = 0.0;
  const int n = 100000;
  for (int t = 1; t <= n; ++t) {
    CodebookStream stream(kFair, cfg.seed, t, 0);
    sum += static_cast<double>(first_match(0, stream, kS0Spec, cfg.j_max).index);
  }
  CHECK(std::abs(sum / n - 2.0) < 0.04);
}

TEST_CASE("synchronization: decoder equals encoder on random S1 rounds") {
  const auto q = ReconDistribution::memoryless({0.6, 0.4}, 4);
  const SourceModel source = SourceModel::product({0.7, 0.3}, 4);
  const CodecConfig cfg{99, 1u << 20};
  for (std::uint64_t t = 1; t <= 1000; ++t) {
    RngStream rng = source_stream(cfg.seed, t);
    const Symbol x = source.sample(rng);
    auto [m, frame] = encode_round(x, q, 3, t, kS1Spec, cfg);
    const Symbol decoded = decode_round(frame, q, 3, t, kS1Spec, cfg);
    CHECK(decoded == m.reconstruction);
    if (!m.escaped) {
      CHECK(kS1Spec.total(x, m.reconstruction) <= kS1Spec.level());
      CHECK(m.bits == doctest::Approx(std::log2(double(m.index))));
    }
  }
}

TEST_CASE("codeword streams are pure functions of (seed, t, action, j)") {
  CodebookStream a(kFair, 11, 22, 33), b(kFair, 11, 22, 33);
  for (std::uint64_t j = 1; j <= 64; ++j) CHECK(a.at(j) == b.at(j));
  CodebookStream c(kFair, 11, 22, 34);
  bool any_diff = false;
  for (std::uint64_t j = 1; j <= 64; ++j) any_diff |= a.at(j) != c.at(j);
  CHECK(any_diff);
}
