#pragma once

#include <cstdint>
#include <vector>

#include "banditlc/typespace.hpp"

namespace banditlc {

// One simulated round. cost_bits is the idealized log2(J) (or escape cost)
// used by all bandit statistics; emitted_bits is the framed length.
struct RoundRecord {
  std::uint32_t action = 0;
  double cost_bits = 0.0;
  std::uint32_t emitted_bits = 0;
  bool escaped = false;
  Symbol reconstruction = 0;
};

// Append-only run record; the prefix of length t-1 is the restricted
// history available to the policy before round t.
struct PolicyTrace {
  std::vector<RoundRecord> rounds;
  std::size_t horizon() const { return rounds.size(); }
};

}  // namespace banditlc
