#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "banditlc/codec.hpp"
#include "banditlc/model.hpp"
#include "banditlc/trace.hpp"

namespace banditlc {

enum class NtsVariant {
  kUniformMixture,  // fixed uniform mixture over types
  kMyopic,          // next action from the type of the last reconstruction
  kAveraged,        // block-averaged types, action held for k rounds
};

struct NtsConfig {
  NtsVariant variant = NtsVariant::kMyopic;
  int k = 1;                                // averaging window (kAveraged)
  std::vector<double> initial_per_symbol;   // Q_1 for kMyopic / kAveraged
  double smoothing_floor = 1e-3;  // per-symbol pmf floor applied before codebook generation
};

// TypeMixture with weights 1/tau_l.
ReconDistribution uniform_type_mixture(int length, int v_size);

// Memoryless(empirical type of y_prev / l). Point-mass types land on
// distributions with zero match probability for some x; the episode runner
// floors them before codebook generation.
ReconDistribution nts_myopic_step(Symbol y_prev, int v_size, int length);

// Memoryless((1/k) sum_i type(y_i) / l); reduces to the myopic step at k=1.
ReconDistribution nts_averaged_step(std::span<const Symbol> block, int v_size, int length);

// D_KL(q_star || q1) in bits; +inf on support violation.
double nts_regret_bound(std::span<const double> q1, std::span<const double> q_star);

// Policy state. The update channel carries reconstructions only: these
// policies never see costs or clean source symbols.
struct NtsState {
  NtsVariant variant = NtsVariant::kMyopic;
  int k = 1;
  std::vector<double> current_per_symbol;  // raw (unfloored) action, kMyopic/kAveraged
  std::vector<double> type_accumulator;    // running sum of type distributions
  int block_pos = 0;

  void observe_reconstruction(Symbol y, int v_size, int length);
};

struct NtsEpisodeResult {
  PolicyTrace trace;
  // action table indexed by RoundRecord::action: the distribution actually
  // used for encoding, and the raw action before the smoothing floor
  std::vector<ReconDistribution> actions;
  std::vector<ReconDistribution> raw_actions;
};

// Same round mechanics as the LCB episode; only action selection differs.
NtsEpisodeResult run_nts_episode(const SourceModel& source, const DistortionSpec& spec,
                                 const NtsConfig& cfg, std::uint64_t horizon, std::uint64_t seed,
                                 std::uint64_t j_max = kDefaultJMax);

// Achievable action class used as the regret reference: all type-induced
// actions (uniform-on-type for the mixture variant, floored memoryless
// otherwise).
std::vector<ReconDistribution> nts_reference_actions(NtsVariant variant,
                                                     const DistortionSpec& spec,
                                                     double smoothing_floor);

}  // namespace banditlc
