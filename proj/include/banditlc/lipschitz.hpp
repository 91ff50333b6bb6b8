#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "banditlc/lcb.hpp"
#include "banditlc/model.hpp"
#include "banditlc/oracle.hpp"

namespace banditlc {

// max_x |ln p(x,Q1) - ln p(x,Q2)|, in nats; +inf when either probability
// vanishes for some x.
double metric_mu(const ReconDistribution& q1, const ReconDistribution& q2,
                 const DistortionSpec& spec);

// Covering net of the eta-floored simplex P^(eta)(Y): every member is
// within metric distance epsilon of some net point, so expected costs
// differ by at most epsilon (in nats).
struct CoveringNet {
  std::vector<ReconDistribution> points;  // categorical distributions over Y
  double epsilon = 0.0;
  double eta = 0.0;
  double beta = 0.0;          // final grid resolution
  std::uint64_t max_matches = 0;
  double lemma_cardinality = 0.0;  // (sqrt(max_matches)/(eta epsilon))^(|Y|-1)
  int refinements = 0;        // resolution halvings needed to pass verification
};

// Uniform midpoint grid of resolution beta = eta*epsilon/sqrt(max_matches)
// on the first |Y|-1 coordinates, floored into P^(eta); a verification pass
// over random members of P^(eta) halves beta until the epsilon-cover holds
// empirically.
CoveringNet build_net(double eta, double epsilon, const DistortionSpec& spec,
                      int verify_samples = 1000, std::uint64_t verify_seed = 0x6e65747665ull);

struct GammaReport {
  std::uint64_t max_matches = 0;
  double gamma = 0.0;         // (1/(lambda eta^{|Y|+1})) max_matches^{(|Y|-1)/2}
  double epsilon_star = 0.0;  // ((gamma ln T)/T)^{1/(|Y|+1)}
};

GammaReport gamma_and_epsilon(const DistortionSpec& spec, double eta, double lambda,
                              std::uint64_t horizon);

// Envelope (gamma T^{|Y|} ln T)^{1/(|Y|+1)}, scaled by `constant`.
double thm2_envelope(double gamma, std::uint64_t y_size, std::uint64_t horizon,
                     double constant = 1.0);

// Best expected cost over all of P^(eta)(Y) by fine grid search
// (|Y| <= 3; S-scale oracle). `clamped` reports an optimizer sitting on the
// eta boundary.
struct ContinuumOptimum {
  std::vector<double> pmf;
  double cost_bits = 0.0;
  bool clamped = false;
};
ContinuumOptimum continuum_optimal_cost(const SourceModel& source, const DistortionSpec& spec,
                                        double eta, double resolution = 1e-4);

struct LipschitzRunResult {
  GammaReport gamma_report;
  CoveringNet net;
  GapReport net_gaps;
  PolicyTrace trace;
  ContinuumOptimum continuum;
  double approx_per_round = 0.0;           // b-tilde(net best) - continuum optimum
  std::vector<double> regret_net;          // vs best net point
  std::vector<double> regret_continuum;    // regret_net + t * approx_per_round
  double envelope = 0.0;                   // thm2 envelope at the horizon
};

// Builds the net at the optimized discretization and delegates to the LCB
// episode over the net points. `base` supplies alpha / c / j_max; eta for
// the confidence radius is taken from the net oracle.
LipschitzRunResult run_lipschitz_bandit(const SourceModel& source, const DistortionSpec& spec,
                                        double eta, double lambda, std::uint64_t horizon,
                                        std::uint64_t seed, const LcbConfig& base);

// Net serialization for reproducibility.
std::string net_to_json(const CoveringNet& net);
CoveringNet net_from_json(const std::string& text);

}  // namespace banditlc
