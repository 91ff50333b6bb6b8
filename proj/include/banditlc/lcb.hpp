#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "banditlc/codec.hpp"
#include "banditlc/model.hpp"
#include "banditlc/trace.hpp"

namespace banditlc {

struct LcbConfig {
  double alpha = 3.0;  // confidence schedule delta_t = t^-alpha; requires alpha > 2
  double c = 1.0;      // confidence constant (calibrate against coverage)
  double eta = 0.0;    // lower bound on min match probability, oracle-supplied
  std::uint64_t j_max = kDefaultJMax;
  bool allow_escape_arms = false;  // accept arms with p(x,Q) = 0 for some x
};

// Per-action observation ledger.
struct ArmState {
  std::vector<double> costs;  // observed idealized bit costs
  std::size_t pulls() const { return costs.size(); }
  double mean() const;
};

// mean(costs) - (c/eta) sqrt(ln(1/delta)/n); -inf when unpulled so that
// every arm is forced once before any comparison.
double lcb_value(const ArmState& arm, double delta, const LcbConfig& cfg);

// argmin of lcb_value at delta_t = t^-alpha; ties break to the lowest index.
std::size_t select_action(std::span<const ArmState> arms, std::uint64_t t,
                          const LcbConfig& cfg);

// Validates alpha > 2, eta in (0,1), and eta <= min match probability of
// every arm (zero-probability arms are rejected unless escape is allowed).
void validate_lcb_setup(const std::vector<ReconDistribution>& arms, const DistortionSpec& spec,
                        const LcbConfig& cfg);

// Full select / generate codebook / match / update loop. Deterministic
// given (config, seed); one episode is strictly sequential.
PolicyTrace run_lcb_episode(const SourceModel& source, const std::vector<ReconDistribution>& arms,
                            const DistortionSpec& spec, const LcbConfig& cfg,
                            std::uint64_t horizon, std::uint64_t seed);

// sum over suboptimal arms of 4 c^2 alpha / (eta^2 Delta) ln(t)
//   + 2 (alpha-1)/(alpha-2) Delta.
double regret_bound_thm1(std::span<const double> gaps, double t, const LcbConfig& cfg);

}  // namespace banditlc
