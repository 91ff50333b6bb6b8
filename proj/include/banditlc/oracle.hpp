#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "banditlc/model.hpp"
#include "banditlc/trace.hpp"

namespace banditlc {

// Exact ground truth for expected costs, optimal actions and gaps, plus a
// fixed-distortion Blahut-Arimoto reference and confidence calibration.

// E[log2 J] for J ~ Geometric(p), by truncated series with a certified
// tail bound <= tol. Throws for p <= 0.
double expected_bits_given_x(double p, double tol, std::uint64_t* truncation_index = nullptr,
                             double* tail_bound = nullptr);

// E[ln J] for J ~ Geometric(p) via the Laplace-transform identity
//   E[ln U] = int_0^inf (e^-t - E[e^-tU]) dt / t
// evaluated by adaptive quadrature. Numerically independent of the series
// route; used as a cross-check.
double expected_log_given_x_integral(double p);

struct CostReport {
  std::vector<double> per_x;  // b-bar(x, Q) in bits (per x-type when X is huge)
  double average = 0.0;       // b-tilde(Q) in bits
  std::uint64_t truncation_index = 0;
  double tail_bound = 0.0;
};

// b-tilde(Q) = sum_x P_X(x) E[log2 Geometric(p(x,Q))]. Product sources with
// additive distortion and memoryless Q aggregate over x-types, so long
// blocks stay exact. Throws if some p(x,Q) = 0.
CostReport expected_bits(const ReconDistribution& q, const SourceModel& source,
                         const DistortionSpec& spec, double tol);

// Certified lower bound on b-tilde via Markov at m ~ 1/(2p):
// E[log2 J] >= log2(m) (1-p)^(m-1). Used to prune grid searches; +inf when
// some supported x has p(x,Q) = 0.
double expected_bits_lower_bound(const ReconDistribution& q, const SourceModel& source,
                                 const DistortionSpec& spec);

// Escape-model cost: the scan stops at j_max and pays `escape_cost` with
// probability (1-p)^j_max, so zero-probability symbols stay finite.
double expected_bits_given_x_truncated(double p, std::uint64_t j_max, double escape_cost,
                                       double tol);
CostReport expected_bits_truncated(const ReconDistribution& q, const SourceModel& source,
                                   const DistortionSpec& spec, std::uint64_t j_max, double tol);

struct GapReport {
  std::size_t a_star = 0;
  double r_star = 0.0;             // optimal expected cost (bits)
  std::vector<double> cost;        // b-tilde per arm
  std::vector<double> gaps;        // Delta(a) >= 0
  double delta_min = 0.0;          // over positive gaps
  double delta_max = 0.0;
  double lambda = 1.0;             // delta_max / delta_min, 1 when degenerate
  double eta = 0.0;                // min over arms of min_x p(x, Q)
  bool eta_has_zero = false;
};

// With `escape_j_max` set, costs are the truncated-codebook values (finite
// for zero-probability arms); otherwise idealized costs, and arms with a
// zero match probability report an infinite cost.
GapReport optimal_action_and_gaps(const std::vector<ReconDistribution>& arms,
                                  const SourceModel& source, const DistortionSpec& spec,
                                  double tol,
                                  std::optional<std::uint64_t> escape_j_max = std::nullopt);

// Cumulative sum_a N_t(a) Delta(a) per round.
std::vector<double> pseudo_regret_of_trace(const PolicyTrace& trace,
                                           std::span<const double> gaps);

struct BlahutArimotoResult {
  std::vector<double> q_star;         // optimal per-symbol reproduction pmf
  double rate_bits = 0.0;             // R(P_U, d)
  double distortion = 0.0;            // achieved E[rho], within tol of d
  int iterations = 0;
  std::vector<double> rate_history;   // per-iteration rate, nonincreasing
};

// Alternating minimization with the distortion pinned at d by bisection on
// the tilt multiplier at every step.
BlahutArimotoResult blahut_arimoto_fixed_distortion(std::span<const double> p_u,
                                                    const std::vector<std::vector<double>>& rho,
                                                    double d, double tol = 1e-9,
                                                    int max_iters = 5000);

struct CoverageCell {
  double delta = 0.0;
  int n = 0;
  double coverage = 0.0;  // at the calibrated c
};

struct CalibrationResult {
  double c = 0.0;
  bool achieved = false;  // false: no grid value reached target coverage
  double eta = 0.0;
  double b_tilde = 0.0;
  std::vector<CoverageCell> cells;
};

// Smallest c on the grid such that the empirical coverage of
//   |mean_n(log2 J) - b_tilde| <= (c/eta) sqrt(ln(1/delta)/n)
// is >= 1-delta for every (delta, n) cell, over `reps` replications.
CalibrationResult calibrate_confidence_constant(const SourceModel& source,
                                                const ReconDistribution& q,
                                                const DistortionSpec& spec,
                                                std::span<const double> deltas,
                                                std::span<const int> ns, int reps,
                                                std::uint64_t seed,
                                                std::span<const double> c_grid = {});

// D_KL(p || q) in bits; +inf on support violation.
double kl_divergence_bits(std::span<const double> p, std::span<const double> q);

// Geometric(p) sampler by inverse transform (used by calibration and tests).
std::uint64_t sample_geometric(double p, RngStream& rng);

}  // namespace banditlc
