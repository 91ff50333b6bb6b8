#include "banditlc/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace banditlc {

namespace {

constexpr std::uint64_t kNetGuard = 10'000'000;

// representative x per type when the instance admits the type reduction,
// otherwise every x
std::vector<Symbol> x_representatives(const DistortionSpec& spec, bool type_reduce) {
  std::vector<Symbol> xs;
  if (type_reduce) {
    TypeEnumeration types(spec.length(), spec.u_size());
    xs.reserve(types.count());
    for (std::size_t j = 0; j < types.count(); ++j) {
      std::vector<int> digits;
      for (int u = 0; u < spec.u_size(); ++u) {
        digits.insert(digits.end(), types.at(j).counts[u], u);
      }
      xs.push_back(symbol_from_digits(digits, spec.u_size()));
    }
    return xs;
  }
  if (spec.x_size() > kEnumerationGuard) {
    throw std::length_error("metric_mu: X too large to enumerate");
  }
  xs.reserve(spec.x_size());
  for (Symbol x = 0; x < spec.x_size(); ++x) xs.push_back(x);
  return xs;
}

std::uint64_t min_matches(const DistortionSpec& spec) {
  std::uint64_t best = UINT64_MAX;
  const bool additive = spec.additive_form();
  for (Symbol x : x_representatives(spec, additive)) {
    best = std::min(best, spec.count_matches(x));
  }
  return best;
}

// Random member of P^(eta): eta floor plus Dirichlet(1,...,1) bulk.
std::vector<double> random_floored_pmf(std::size_t n, double eta, RngStream& rng) {
  std::vector<double> e(n);
  double sum = 0.0;
  for (double& v : e) {
    v = -std::log(1.0 - rng.next_unit());
    sum += v;
  }
  const double bulk = 1.0 - eta * static_cast<double>(n);
  for (double& v : e) v = eta + bulk * v / sum;
  return e;
}

}  // namespace

double metric_mu(const ReconDistribution& q1, const ReconDistribution& q2,
                 const DistortionSpec& spec) {
  const bool reduce = spec.additive_form() && q1.is_memoryless() && q2.is_memoryless();
  double mu = 0.0;
  for (Symbol x : x_representatives(spec, reduce)) {
    const double p1 = match_probability(q1, x, spec);
    const double p2 = match_probability(q2, x, spec);
    if (p1 <= 0.0 || p2 <= 0.0) return std::numeric_limits<double>::infinity();
    mu = std::max(mu, std::abs(std::log(p1 / p2)));
  }
  return mu;
}

CoveringNet build_net(double eta, double epsilon, const DistortionSpec& spec,
                      int verify_samples, std::uint64_t verify_seed) {
  const std::uint64_t y = spec.y_size();
  if (!(eta > 0.0) || !(epsilon > 0.0)) {
    throw std::invalid_argument("build_net: eta and epsilon must be positive");
  }
  if (eta * static_cast<double>(y) >= 1.0) {
    throw std::invalid_argument("build_net: infeasible (eta * |Y| >= 1)");
  }
  if (y > 64) throw std::length_error("build_net: Y too large for a simplex net");

  CoveringNet net;
  net.eta = eta;
  net.epsilon = epsilon;
  net.max_matches = spec.max_matches();
  net.lemma_cardinality =
      std::pow(std::sqrt(static_cast<double>(net.max_matches)) / (eta * epsilon),
               static_cast<double>(y - 1));

  auto verify = [&](const std::vector<ReconDistribution>& points) {
    RngStream rng(derive_key({verify_seed, stream_tag::kAux, y}));
    for (int s = 0; s < verify_samples; ++s) {
      const auto q = ReconDistribution::categorical(random_floored_pmf(y, eta, rng));
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : points) best = std::min(best, metric_mu(q, p, spec));
      if (best > epsilon) return false;
    }
    return true;
  };

  // degenerate cover: a single point suffices whenever epsilon reaches the
  // metric diameter bound ln(1/(eta * min_matches)) of P^(eta)
  const double diameter_bound =
      std::log(1.0 / (eta * static_cast<double>(std::max<std::uint64_t>(min_matches(spec), 1))));
  if (epsilon >= diameter_bound) {
    std::vector<double> uniform(y, 1.0 / static_cast<double>(y));
    net.points.push_back(ReconDistribution::categorical(clamp_to_floor(uniform, eta)));
    net.beta = 1.0;
    if (!verify(net.points)) {
      throw std::logic_error("build_net: single-point cover failed verification");
    }
    return net;
  }

  double beta = eta * epsilon / std::sqrt(static_cast<double>(net.max_matches));
  for (int refinement = 0;; ++refinement) {
    if (refinement > 8) throw std::runtime_error("build_net: verification kept failing");
    const std::uint64_t m = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(1.0 / beta));
    double cardinality = 1.0;
    for (std::uint64_t i = 0; i + 1 < y; ++i) cardinality *= static_cast<double>(m);
    if (cardinality > static_cast<double>(kNetGuard)) {
      throw std::length_error("build_net: grid cardinality exceeds guard");
    }

    std::set<std::vector<double>> unique_points;
    std::vector<std::uint64_t> idx(y - 1, 0);
    while (true) {
      std::vector<double> q(y, 0.0);
      double head = 0.0;
      for (std::uint64_t i = 0; i + 1 < y; ++i) {
        q[i] = (static_cast<double>(idx[i]) + 0.5) / static_cast<double>(m);
        head += q[i];
      }
      if (head >= 1.0) {
        // grid point outside the simplex: scale its head mass onto the face
        for (std::uint64_t i = 0; i + 1 < y; ++i) q[i] /= head;
        q[y - 1] = 0.0;
      } else {
        q[y - 1] = 1.0 - head;
      }
      unique_points.insert(clamp_to_floor(q, eta));

      std::size_t pos = 0;
      while (pos < idx.size() && ++idx[pos] == m) idx[pos++] = 0;
      if (pos == idx.size()) break;
    }

    std::vector<ReconDistribution> points;
    points.reserve(unique_points.size());
    for (const auto& p : unique_points) points.push_back(ReconDistribution::categorical(p));

    if (verify(points)) {
      net.points = std::move(points);
      net.beta = beta;
      net.refinements = refinement;
      return net;
    }
    beta *= 0.5;
  }
}

GammaReport gamma_and_epsilon(const DistortionSpec& spec, double eta, double lambda,
                              std::uint64_t horizon) {
  if (!(lambda > 0.0)) throw std::invalid_argument("gamma_and_epsilon: lambda must be positive");
  if (horizon < 2) throw std::invalid_argument("gamma_and_epsilon: horizon must be >= 2");
  GammaReport g;
  g.max_matches = spec.max_matches();
  const double y = static_cast<double>(spec.y_size());
  g.gamma = std::pow(static_cast<double>(g.max_matches), (y - 1.0) / 2.0) /
            (lambda * std::pow(eta, y + 1.0));
  const double t = static_cast<double>(horizon);
  g.epsilon_star = std::pow(g.gamma * std::log(t) / t, 1.0 / (y + 1.0));
  return g;
}

double thm2_envelope(double gamma, std::uint64_t y_size, std::uint64_t horizon,
                     double constant) {
  const double y = static_cast<double>(y_size);
  const double t = static_cast<double>(horizon);
  return constant * std::pow(gamma * std::pow(t, y) * std::log(t), 1.0 / (y + 1.0));
}

ContinuumOptimum continuum_optimal_cost(const SourceModel& source, const DistortionSpec& spec,
                                        double eta, double resolution) {
  const std::uint64_t y = spec.y_size();
  if (y < 2 || y > 3) {
    throw std::length_error("continuum_optimal_cost: fine grid oracle limited to |Y| in {2,3}");
  }
  ContinuumOptimum best;
  best.cost_bits = std::numeric_limits<double>::infinity();
  auto consider = [&](std::vector<double> q) {
    const double cost =
        expected_bits(ReconDistribution::categorical(q), source, spec, 1e-9).average;
    if (cost < best.cost_bits) {
      best.cost_bits = cost;
      best.pmf = std::move(q);
    }
  };
  if (y == 2) {
    for (double q0 = eta; q0 <= 1.0 - eta + 1e-15; q0 += resolution) {
      consider({q0, 1.0 - q0});
    }
  } else {
    for (double q0 = eta; q0 <= 1.0 - 2.0 * eta + 1e-15; q0 += resolution) {
      for (double q1 = eta; q0 + q1 <= 1.0 - eta + 1e-15; q1 += resolution) {
        consider({q0, q1, 1.0 - q0 - q1});
      }
    }
  }
  for (double v : best.pmf) {
    if (v <= eta + resolution) best.clamped = true;
  }
  return best;
}

LipschitzRunResult run_lipschitz_bandit(const SourceModel& source, const DistortionSpec& spec,
                                        double eta, double lambda, std::uint64_t horizon,
                                        std::uint64_t seed, const LcbConfig& base) {
  LipschitzRunResult res;
  res.gamma_report = gamma_and_epsilon(spec, eta, lambda, horizon);
  res.net = build_net(eta, res.gamma_report.epsilon_star, spec);
  res.net_gaps = optimal_action_and_gaps(res.net.points, source, spec, 1e-9);

  LcbConfig cfg = base;
  cfg.eta = res.net_gaps.eta;  // exact, >= eta * min matches
  res.trace = run_lcb_episode(source, res.net.points, spec, cfg, horizon, seed);
  res.regret_net = pseudo_regret_of_trace(res.trace, res.net_gaps.gaps);

  res.continuum = continuum_optimal_cost(source, spec, eta);
  res.approx_per_round = std::max(0.0, res.net_gaps.r_star - res.continuum.cost_bits);
  res.regret_continuum.reserve(res.regret_net.size());
  for (std::size_t t = 0; t < res.regret_net.size(); ++t) {
    res.regret_continuum.push_back(res.regret_net[t] +
                                   static_cast<double>(t + 1) * res.approx_per_round);
  }
  res.envelope = thm2_envelope(res.gamma_report.gamma, spec.y_size(), horizon);
  return res;
}

std::string net_to_json(const CoveringNet& net) {
  nlohmann::json j;
  j["epsilon"] = net.epsilon;
  j["eta"] = net.eta;
  j["beta"] = net.beta;
  j["max_matches"] = net.max_matches;
  j["lemma_cardinality"] = net.lemma_cardinality;
  j["refinements"] = net.refinements;
  auto points = nlohmann::json::array();
  for (const auto& p : net.points) {
    const auto& cat = std::get<ReconDistribution::Categorical>(p.variant());
    points.push_back(cat.pmf);
  }
  j["points"] = points;
  return j.dump(2);
}

CoveringNet net_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  CoveringNet net;
  net.epsilon = j.at("epsilon").get<double>();
  net.eta = j.at("eta").get<double>();
  net.beta = j.at("beta").get<double>();
  net.max_matches = j.at("max_matches").get<std::uint64_t>();
  net.lemma_cardinality = j.at("lemma_cardinality").get<double>();
  net.refinements = j.at("refinements").get<int>();
  for (const auto& p : j.at("points")) {
    net.points.push_back(ReconDistribution::categorical(p.get<std::vector<double>>()));
  }
  return net;
}

}  // namespace banditlc
