#include "banditlc/nts.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <functional>
#include <memory>
#include <stdexcept>

#include "banditlc/oracle.hpp"

namespace banditlc {

ReconDistribution uniform_type_mixture(int length, int v_size) {
  auto types = std::make_shared<TypeEnumeration>(length, v_size);
  std::vector<double> w(types->count(), 1.0 / static_cast<double>(types->count()));
  return ReconDistribution::type_mixture(std::move(types), std::move(w));
}

ReconDistribution nts_myopic_step(Symbol y_prev, int v_size, int length) {
  return ReconDistribution::memoryless(empirical_type(y_prev, v_size, length).distribution(),
                                       length);
}

ReconDistribution nts_averaged_step(std::span<const Symbol> block, int v_size, int length) {
  if (block.empty()) throw std::invalid_argument("nts_averaged_step: empty block");
  std::vector<double> avg(v_size, 0.0);
  for (Symbol y : block) {
    const auto p = empirical_type(y, v_size, length).distribution();
    for (int v = 0; v < v_size; ++v) avg[v] += p[v];
  }
  for (double& v : avg) v /= static_cast<double>(block.size());
  return ReconDistribution::memoryless(std::move(avg), length);
}

double nts_regret_bound(std::span<const double> q1, std::span<const double> q_star) {
  return kl_divergence_bits(q_star, q1);
}

void NtsState::observe_reconstruction(Symbol y, int v_size, int length) {
  switch (variant) {
    case NtsVariant::kUniformMixture:
      break;  // fixed action, nothing to learn from
    case NtsVariant::kMyopic:
      current_per_symbol = empirical_type(y, v_size, length).distribution();
      break;
    case NtsVariant::kAveraged: {
      const auto p = empirical_type(y, v_size, length).distribution();
      if (type_accumulator.empty()) type_accumulator.assign(v_size, 0.0);
      for (int v = 0; v < v_size; ++v) type_accumulator[v] += p[v];
      if (++block_pos == k) {
        for (double& v : type_accumulator) v /= static_cast<double>(k);
        current_per_symbol = type_accumulator;
        type_accumulator.assign(v_size, 0.0);
        block_pos = 0;
      }
      break;
    }
  }
}

namespace {

bool needs_floor(std::span<const double> pmf, double floor) {
  return std::any_of(pmf.begin(), pmf.end(), [floor](double p) { return p < floor; });
}

}  // namespace

NtsEpisodeResult run_nts_episode(const SourceModel& source, const DistortionSpec& spec,
                                 const NtsConfig& cfg, std::uint64_t horizon, std::uint64_t seed,
                                 std::uint64_t j_max) {
  if (!spec.additive_form()) {
    throw std::invalid_argument("run_nts_episode: needs an additive (vector) distortion");
  }
  if (cfg.variant == NtsVariant::kAveraged && cfg.k < 1) {
    throw std::invalid_argument("run_nts_episode: k must be positive");
  }
  const int v_size = spec.v_size();
  const int length = spec.length();

  NtsState state;
  state.variant = cfg.variant;
  state.k = cfg.k;
  if (cfg.variant != NtsVariant::kUniformMixture) {
    state.current_per_symbol = cfg.initial_per_symbol.empty()
                                   ? std::vector<double>(v_size, 1.0 / v_size)
                                   : cfg.initial_per_symbol;
    if (static_cast<int>(state.current_per_symbol.size()) != v_size) {
      throw std::invalid_argument("run_nts_episode: initial pmf has wrong alphabet");
    }
  }

  NtsEpisodeResult res;
  res.trace.rounds.reserve(horizon);
  const CodecConfig codec{seed, j_max};

  // action table keyed by the raw per-symbol pmf (mixture variant has a
  // single fixed entry)
  std::map<std::vector<double>, std::uint32_t> action_ids;
  if (cfg.variant == NtsVariant::kUniformMixture) {
    res.actions.push_back(uniform_type_mixture(length, v_size));
    res.raw_actions.push_back(res.actions.back());
  }

  for (std::uint64_t t = 1; t <= horizon; ++t) {
    std::uint32_t action_id = 0;
    if (cfg.variant != NtsVariant::kUniformMixture) {
      auto [it, inserted] = action_ids.try_emplace(
          state.current_per_symbol, static_cast<std::uint32_t>(res.actions.size()));
      action_id = it->second;
      if (inserted) {
        res.raw_actions.push_back(ReconDistribution::memoryless(state.current_per_symbol, length));
        const auto& raw = state.current_per_symbol;
        res.actions.push_back(
            needs_floor(raw, cfg.smoothing_floor)
                ? ReconDistribution::memoryless(clamp_to_floor(raw, cfg.smoothing_floor), length)
                : res.raw_actions.back());
      }
    }
    const ReconDistribution& q = res.actions[action_id];

    RngStream src_rng = source_stream(seed, t);
    const Symbol x = source.sample(src_rng);
    auto [match, frame] = encode_round(x, q, action_id, t, spec, codec);
    res.trace.rounds.push_back(RoundRecord{action_id, match.bits,
                                           static_cast<std::uint32_t>(frame.bit_count),
                                           match.escaped, match.reconstruction});
    state.observe_reconstruction(match.reconstruction, v_size, length);
  }
  return res;
}

namespace {

void compositions(int total, int parts, std::vector<int>& cur,
                  const std::function<void(const std::vector<int>&)>& emit) {
  if (parts == 1) {
    cur.push_back(total);
    emit(cur);
    cur.pop_back();
    return;
  }
  for (int c = 0; c <= total; ++c) {
    cur.push_back(c);
    compositions(total - c, parts - 1, cur, emit);
    cur.pop_back();
  }
}

}  // namespace

std::vector<ReconDistribution> nts_reference_actions(NtsVariant variant,
                                                     const DistortionSpec& spec,
                                                     double smoothing_floor) {
  if (!spec.additive_form()) {
    throw std::invalid_argument("nts_reference_actions: needs an additive distortion");
  }
  std::vector<ReconDistribution> ref;
  if (variant == NtsVariant::kUniformMixture) {
    // mixed actions: weight compositions over the type simplex. Pure types
    // often leave some x with no d-match (infinite idealized cost), so the
    // class optimum sits at an interior mixture.
    auto types = std::make_shared<TypeEnumeration>(spec.length(), spec.v_size());
    const int tau = static_cast<int>(types->count());
    ref.push_back(uniform_type_mixture(spec.length(), spec.v_size()));
    for (int denominator : {8, 4, 2, 1}) {
      if (count_types(denominator, tau) > 20000) continue;  // composition count
      std::vector<int> cur;
      compositions(denominator, tau, cur, [&](const std::vector<int>& counts) {
        std::vector<double> w(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i) {
          w[i] = static_cast<double>(counts[i]) / denominator;
        }
        ref.push_back(ReconDistribution::type_mixture(types, std::move(w)));
      });
      break;
    }
    return ref;
  }
  TypeEnumeration types(spec.length(), spec.v_size());
  ref.reserve(types.count());
  for (std::size_t j = 0; j < types.count(); ++j) {
    auto p = types.at(j).distribution();
    if (needs_floor(p, smoothing_floor)) p = clamp_to_floor(p, smoothing_floor);
    ref.push_back(ReconDistribution::memoryless(std::move(p), spec.length()));
  }
  return ref;
}

}  // namespace banditlc
