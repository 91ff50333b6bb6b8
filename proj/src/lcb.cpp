#include "banditlc/lcb.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace banditlc {

double ArmState::mean() const {
  if (costs.empty()) throw std::logic_error("ArmState::mean: no observations");
  return std::accumulate(costs.begin(), costs.end(), 0.0) / static_cast<double>(costs.size());
}

double lcb_value(const ArmState& arm, double delta, const LcbConfig& cfg) {
  if (arm.costs.empty()) return -std::numeric_limits<double>::infinity();
  if (!(delta > 0.0) || delta > 1.0) {
    throw std::invalid_argument("lcb_value: delta not in (0,1]");
  }
  const double n = static_cast<double>(arm.costs.size());
  const double radius = (cfg.c / cfg.eta) * std::sqrt(std::log(1.0 / delta) / n);
  return arm.mean() - radius;
}

std::size_t select_action(std::span<const ArmState> arms, std::uint64_t t,
                          const LcbConfig& cfg) {
  if (arms.empty()) throw std::invalid_argument("select_action: no arms");
  const double delta_t = std::pow(static_cast<double>(t), -cfg.alpha);
  std::size_t best = 0;
  double best_value = lcb_value(arms[0], delta_t, cfg);
  for (std::size_t a = 1; a < arms.size(); ++a) {
    const double v = lcb_value(arms[a], delta_t, cfg);
    if (v < best_value) {
      best_value = v;
      best = a;
    }
  }
  return best;
}

void validate_lcb_setup(const std::vector<ReconDistribution>& arms, const DistortionSpec& spec,
                        const LcbConfig& cfg) {
  if (!(cfg.alpha > 2.0)) throw std::invalid_argument("alpha must exceed 2");
  if (!(cfg.eta > 0.0) || cfg.eta >= 1.0) {
    throw std::invalid_argument("eta must lie in (0,1); supply it from the oracle");
  }
  if (arms.empty()) throw std::invalid_argument("no arms registered");
  for (std::size_t a = 0; a < arms.size(); ++a) {
    const MinMatchResult mm = min_match_probability(arms[a], spec);
    if (mm.has_zero && !cfg.allow_escape_arms) {
      throw std::invalid_argument("arm " + std::to_string(a) +
                                  " has zero match probability; enable escape handling");
    }
    // with escapes the radius scale is heuristic (costs are bounded by the
    // escape cost), so eta is the caller's choice there
    if (!cfg.allow_escape_arms && cfg.eta > mm.value + 1e-12) {
      throw std::invalid_argument("eta exceeds min match probability of arm " +
                                  std::to_string(a));
    }
  }
}

PolicyTrace run_lcb_episode(const SourceModel& source, const std::vector<ReconDistribution>& arms,
                            const DistortionSpec& spec, const LcbConfig& cfg,
                            std::uint64_t horizon, std::uint64_t seed) {
  validate_lcb_setup(arms, spec, cfg);
  const CodecConfig codec{seed, cfg.j_max};
  std::vector<ArmState> states(arms.size());
  PolicyTrace trace;
  trace.rounds.reserve(horizon);
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const std::size_t a = select_action(states, t, cfg);
    RngStream src_rng = source_stream(seed, t);
    const Symbol x = source.sample(src_rng);
    auto [match, frame] = encode_round(x, arms[a], a, t, spec, codec);
    states[a].costs.push_back(match.bits);
    trace.rounds.push_back(RoundRecord{static_cast<std::uint32_t>(a), match.bits,
                                       static_cast<std::uint32_t>(frame.bit_count),
                                       match.escaped, match.reconstruction});
  }
  return trace;
}

double regret_bound_thm1(std::span<const double> gaps, double t, const LcbConfig& cfg) {
  if (!(cfg.alpha > 2.0)) throw std::invalid_argument("alpha must exceed 2");
  double bound = 0.0;
  for (double gap : gaps) {
    if (gap <= 0.0) continue;
    bound += 4.0 * cfg.c * cfg.c * cfg.alpha / (cfg.eta * cfg.eta * gap) * std::log(t) +
             2.0 * (cfg.alpha - 1.0) / (cfg.alpha - 2.0) * gap;
  }
  return bound;
}

}  // namespace banditlc
