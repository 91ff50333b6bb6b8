#include "banditlc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace banditlc {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_sig12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.11e", v);
  return buf;
}

double canonical12(double v) { return std::stod(format_sig12(v)); }

namespace {

json canonicalize(const json& j) {
  if (j.is_number_float()) return canonical12(j.get<double>());
  if (j.is_object()) {
    json out = json::object();
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = canonicalize(it.value());
    return out;
  }
  if (j.is_array()) {
    json out = json::array();
    for (const auto& v : j) out.push_back(canonicalize(v));
    return out;
  }
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

void write_json(const fs::path& path, const json& j) {
  write_text(path, canonicalize(j).dump(2) + "\n");
}

[[noreturn]] void config_error(const std::string& where, const std::string& message) {
  throw std::invalid_argument("config error at " + where + ": " + message);
}

void expect_keys(const json& obj, const std::string& where,
                 std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
          return it.key() == k;
        }) == allowed.end()) {
      config_error(where, "unknown key '" + it.key() + "'");
    }
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) config_error(where, std::string("missing key '") + key + "'");
  return *it;
}

std::vector<double> as_pmf(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) config_error(where, "expected a nonempty array of numbers");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) config_error(where, "expected a number");
    v.push_back(e.get<double>());
  }
  return v;
}

std::vector<std::vector<double>> as_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) config_error(where, "expected a nonempty array of rows");
  std::vector<std::vector<double>> m;
  for (const auto& row : j) m.push_back(as_pmf(row, where));
  return m;
}

SourceModel parse_source(const json& j) {
  expect_keys(j, "/scenario/source", {"pmf", "per_symbol_pmf", "length"});
  if (j.contains("pmf")) {
    if (j.contains("per_symbol_pmf") || j.contains("length")) {
      config_error("/scenario/source", "give either pmf or per_symbol_pmf+length");
    }
    return SourceModel::categorical(as_pmf(j["pmf"], "/scenario/source/pmf"));
  }
  if (!j.contains("per_symbol_pmf") || !j.contains("length")) {
    config_error("/scenario/source", "give either pmf or per_symbol_pmf+length");
  }
  return SourceModel::product(as_pmf(j["per_symbol_pmf"], "/scenario/source/per_symbol_pmf"),
                              j["length"].get<int>());
}

DistortionSpec parse_distortion(const json& j, const SourceModel& source) {
  expect_keys(j, "/scenario/distortion", {"kind", "level", "table", "per_symbol_table"});
  const std::string kind = require(j, "kind", "/scenario/distortion").get<std::string>();
  const double level = require(j, "level", "/scenario/distortion").get<double>();
  const auto& ps = source.product_structure();
  if (kind == "hamming") {
    if (ps) {
      return DistortionSpec::additive_hamming(static_cast<int>(ps->per_symbol_pmf.size()),
                                              ps->length, level);
    }
    return DistortionSpec::hamming(source.alphabet_size(), level);
  }
  if (kind == "table") {
    return DistortionSpec::table(as_matrix(require(j, "table", "/scenario/distortion"),
                                           "/scenario/distortion/table"),
                                 level);
  }
  if (kind == "additive") {
    if (!ps) config_error("/scenario/distortion", "additive distortion needs a product source");
    return DistortionSpec::additive(
        as_matrix(require(j, "per_symbol_table", "/scenario/distortion"),
                  "/scenario/distortion/per_symbol_table"),
        ps->length, level);
  }
  config_error("/scenario/distortion/kind", "expected hamming | table | additive");
}

ReconDistribution parse_arm(const json& j, const DistortionSpec& spec, const std::string& where) {
  expect_keys(j, where, {"categorical", "memoryless", "uniform_on_type", "type_mixture"});
  if (j.size() != 1) config_error(where, "arm must have exactly one kind");
  if (j.contains("categorical")) {
    return ReconDistribution::categorical(as_pmf(j["categorical"], where));
  }
  if (!spec.additive_form()) config_error(where, "vector arm kinds need an additive distortion");
  if (j.contains("memoryless")) {
    return ReconDistribution::memoryless(as_pmf(j["memoryless"], where), spec.length());
  }
  if (j.contains("uniform_on_type")) {
    std::vector<int> counts;
    for (const auto& e : j["uniform_on_type"]) counts.push_back(e.get<int>());
    return ReconDistribution::uniform_on_type(TypeVector{counts});
  }
  auto types = std::make_shared<TypeEnumeration>(spec.length(), spec.v_size());
  return ReconDistribution::type_mixture(std::move(types), as_pmf(j["type_mixture"], where));
}

PolicySettings parse_policy(const json& j) {
  expect_keys(j, "/policy",
              {"name", "alpha", "c", "eta", "lambda", "net_eta", "initial_per_symbol",
               "smoothing_floor", "reference_types", "allow_escape_arms"});
  PolicySettings p;
  p.name = require(j, "name", "/policy").get<std::string>();
  if (p.name == "lcb") {
    p.kind = PolicyKind::kLcb;
  } else if (p.name == "lipschitz") {
    p.kind = PolicyKind::kLipschitz;
  } else if (p.name == "nts-v1") {
    p.kind = PolicyKind::kNtsV1;
  } else if (p.name == "nts-v2") {
    p.kind = PolicyKind::kNtsV2;
  } else if (p.name.rfind("nts-v3:k=", 0) == 0) {
    p.kind = PolicyKind::kNtsV3;
    try {
      p.k = std::stoi(p.name.substr(9));
    } catch (const std::exception&) {
      config_error("/policy/name", "cannot parse k in '" + p.name + "'");
    }
    if (p.k < 1) config_error("/policy/name", "k must be positive");
  } else {
    config_error("/policy/name",
                 "expected lcb | lipschitz | nts-v1 | nts-v2 | nts-v3:k=<int>");
  }
  if (j.contains("alpha")) p.alpha = j["alpha"].get<double>();
  if (p.kind == PolicyKind::kLcb || p.kind == PolicyKind::kLipschitz) {
    if (!(p.alpha > 2.0)) config_error("/policy/alpha", "alpha must exceed 2");
  }
  if (j.contains("c")) {
    if (j["c"].is_string()) {
      if (j["c"].get<std::string>() != "calibrate") {
        config_error("/policy/c", "expected a number or \"calibrate\"");
      }
    } else {
      p.c = j["c"].get<double>();
      if (!(*p.c > 0.0)) config_error("/policy/c", "c must be positive");
    }
  } else {
    p.c = 1.0;  // default constant; calibration is opt-in
  }
  if (j.contains("eta")) {
    if (j["eta"].is_string()) {
      if (j["eta"].get<std::string>() != "oracle") {
        config_error("/policy/eta", "expected a number or \"oracle\"");
      }
    } else {
      p.eta = j["eta"].get<double>();
    }
  }
  if (j.contains("lambda")) p.lambda = j["lambda"].get<double>();
  if (j.contains("net_eta")) p.net_eta = j["net_eta"].get<double>();
  if (j.contains("initial_per_symbol")) {
    p.initial_per_symbol = as_pmf(j["initial_per_symbol"], "/policy/initial_per_symbol");
  }
  if (j.contains("smoothing_floor")) p.smoothing_floor = j["smoothing_floor"].get<double>();
  if (j.contains("reference_types")) p.reference_types = j["reference_types"].get<bool>();
  if (j.contains("allow_escape_arms")) p.allow_escape_arms = j["allow_escape_arms"].get<bool>();
  if (p.allow_escape_arms && !p.eta) {
    config_error("/policy/eta", "escape-enabled runs need an explicit numeric eta");
  }
  if (p.allow_escape_arms && !p.c) {
    config_error("/policy/c", "escape-enabled runs need an explicit c (no calibration)");
  }
  return p;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  expect_keys(j, "/",
              {"scenario", "policy", "arms", "horizon", "seeds", "j_max", "tolerances",
               "calibration", "output_dir"});
  const json& scenario = require(j, "scenario", "/");
  expect_keys(scenario, "/scenario", {"source", "distortion"});

  SourceModel source = parse_source(require(scenario, "source", "/scenario"));
  DistortionSpec spec = parse_distortion(require(scenario, "distortion", "/scenario"), source);
  if (source.alphabet_size() != spec.x_size()) {
    config_error("/scenario", "distortion X alphabet does not match the source");
  }
  spec.validate_feasible();

  ExperimentConfig cfg{std::move(source), std::move(spec), parse_policy(require(j, "policy", "/")),
                       {},              // arms
                       0,               // horizon
                       {},              // seeds
                       kDefaultJMax, 1e-9, CalibrationSettings{}, "out", json{}};

  if (cfg.policy.kind == PolicyKind::kLcb) {
    const json& arms = require(j, "arms", "/");
    if (!arms.is_array() || arms.empty()) config_error("/arms", "expected a nonempty array");
    for (std::size_t i = 0; i < arms.size(); ++i) {
      cfg.arms.push_back(parse_arm(arms[i], cfg.spec, "/arms/" + std::to_string(i)));
      if (cfg.arms.back().alphabet_size() != cfg.spec.y_size()) {
        config_error("/arms/" + std::to_string(i), "arm alphabet does not match Y");
      }
    }
  } else if (j.contains("arms")) {
    config_error("/arms", "arms are only accepted for the lcb policy");
  }
  if (cfg.policy.kind == PolicyKind::kLipschitz) {
    if (!(cfg.policy.net_eta > 0.0)) config_error("/policy/net_eta", "net_eta must be positive");
  }

  cfg.horizon = require(j, "horizon", "/").get<std::uint64_t>();
  if (cfg.horizon < 1) config_error("/horizon", "horizon must be positive");
  for (const auto& s : require(j, "seeds", "/")) cfg.seeds.push_back(s.get<std::uint64_t>());
  if (cfg.seeds.empty()) config_error("/seeds", "expected at least one seed");
  if (j.contains("j_max")) {
    cfg.j_max = j["j_max"].get<std::uint64_t>();
    if (cfg.j_max < 1) config_error("/j_max", "j_max must be positive");
  }
  if (j.contains("tolerances")) {
    expect_keys(j["tolerances"], "/tolerances", {"series_tol"});
    if (j["tolerances"].contains("series_tol")) {
      cfg.series_tol = j["tolerances"]["series_tol"].get<double>();
    }
  }
  if (j.contains("calibration")) {
    const json& c = j["calibration"];
    expect_keys(c, "/calibration", {"deltas", "ns", "reps", "seed"});
    if (c.contains("deltas")) cfg.calibration.deltas = as_pmf(c["deltas"], "/calibration/deltas");
    if (c.contains("ns")) {
      cfg.calibration.ns.clear();
      for (const auto& n : c["ns"]) cfg.calibration.ns.push_back(n.get<int>());
    }
    if (c.contains("reps")) cfg.calibration.reps = c["reps"].get<int>();
    if (c.contains("seed")) cfg.calibration.seed = c["seed"].get<std::uint64_t>();
  }
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();

  cfg.snapshot = j;
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw std::invalid_argument(path + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                ": " + e.what());
  }
  return parse_config(j);
}

// ----------------------------------------------------------------- execution

namespace {

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::min(8u, std::thread::hardware_concurrency())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void write_trace_csv(const fs::path& path, const PolicyTrace& trace,
                     std::span<const double> regret) {
  std::ostringstream os;
  os << "t,action,cost_bits_idealized,emitted_bits,escaped,cum_pseudo_regret\n";
  for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
    const RoundRecord& r = trace.rounds[i];
    os << (i + 1) << ',' << r.action << ',' << format_sig12(r.cost_bits) << ',' << r.emitted_bits
       << ',' << (r.escaped ? 1 : 0) << ',' << format_sig12(regret[i]) << '\n';
  }
  write_text(path, os.str());
}

void write_regret_csv(const fs::path& path, const std::vector<std::vector<double>>& curves) {
  const std::size_t horizon = curves.front().size();
  const double n = static_cast<double>(curves.size());
  std::ostringstream os;
  os << "t,mean_pseudo_regret,stderr\n";
  for (std::size_t t = 0; t < horizon; ++t) {
    double mean = 0.0;
    for (const auto& c : curves) mean += c[t];
    mean /= n;
    double var = 0.0;
    for (const auto& c : curves) var += (c[t] - mean) * (c[t] - mean);
    const double stderr_t = curves.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
    os << (t + 1) << ',' << format_sig12(mean) << ',' << format_sig12(stderr_t) << '\n';
  }
  write_text(path, os.str());
}

json gaps_to_json(const GapReport& g) {
  json j;
  j["a_star"] = g.a_star;
  j["r_star"] = g.r_star;
  j["cost"] = g.cost;
  j["gaps"] = g.gaps;
  j["delta_min"] = g.delta_min;
  j["delta_max"] = g.delta_max;
  j["lambda"] = g.lambda;
  j["eta"] = g.eta;
  j["eta_has_zero"] = g.eta_has_zero;
  return j;
}

json calibration_to_json(const CalibrationResult& c) {
  json j;
  j["c"] = c.c;
  j["achieved"] = c.achieved;
  j["eta"] = c.eta;
  j["b_tilde"] = c.b_tilde;
  auto cells = json::array();
  for (const auto& cell : c.cells) {
    cells.push_back({{"delta", cell.delta}, {"n", cell.n}, {"coverage", cell.coverage}});
  }
  j["cells"] = cells;
  return j;
}

struct PreparedBandit {
  std::vector<ReconDistribution> arms;
  GapReport gaps;
  LcbConfig lcb;
  json oracle;  // oracle.json payload
};

PreparedBandit prepare_lcb(const ExperimentConfig& cfg) {
  PreparedBandit p;
  p.arms = cfg.arms;
  const std::optional<std::uint64_t> escape_j_max =
      cfg.policy.allow_escape_arms ? std::optional<std::uint64_t>(cfg.j_max) : std::nullopt;
  p.gaps = optimal_action_and_gaps(p.arms, cfg.source, cfg.spec, cfg.series_tol, escape_j_max);
  p.lcb.alpha = cfg.policy.alpha;
  p.lcb.j_max = cfg.j_max;
  p.lcb.allow_escape_arms = cfg.policy.allow_escape_arms;
  p.lcb.eta = cfg.policy.eta.value_or(p.gaps.eta);
  json calibrations = json::array();
  if (cfg.policy.c) {
    p.lcb.c = *cfg.policy.c;
  } else {
    double c = 0.0;
    for (const auto& arm : p.arms) {
      const CalibrationResult r = calibrate_confidence_constant(
          cfg.source, arm, cfg.spec, cfg.calibration.deltas, cfg.calibration.ns,
          cfg.calibration.reps, cfg.calibration.seed);
      c = std::max(c, r.c);
      calibrations.push_back(calibration_to_json(r));
    }
    p.lcb.c = c;
  }
  p.oracle["policy"] = cfg.policy.name;
  p.oracle["gaps"] = gaps_to_json(p.gaps);
  p.oracle["eta_used"] = p.lcb.eta;
  p.oracle["c_used"] = p.lcb.c;
  if (!calibrations.empty()) p.oracle["calibration"] = calibrations;
  auto arms = json::array();
  for (const auto& a : p.arms) arms.push_back(a.describe());
  p.oracle["arms"] = arms;
  return p;
}

PreparedBandit prepare_lipschitz(const ExperimentConfig& cfg, CoveringNet* net_out,
                                 GammaReport* gamma_out, ContinuumOptimum* cont_out) {
  const GammaReport gamma =
      gamma_and_epsilon(cfg.spec, cfg.policy.net_eta, cfg.policy.lambda, cfg.horizon);
  CoveringNet net = build_net(cfg.policy.net_eta, gamma.epsilon_star, cfg.spec);
  PreparedBandit p;
  p.arms = net.points;
  p.gaps = optimal_action_and_gaps(p.arms, cfg.source, cfg.spec, cfg.series_tol);
  p.lcb.alpha = cfg.policy.alpha;
  p.lcb.j_max = cfg.j_max;
  p.lcb.eta = cfg.policy.eta.value_or(p.gaps.eta);
  json calibrations = json::array();
  if (cfg.policy.c) {
    p.lcb.c = *cfg.policy.c;
  } else {
    double c = 0.0;
    for (const auto& arm : p.arms) {
      const CalibrationResult r = calibrate_confidence_constant(
          cfg.source, arm, cfg.spec, cfg.calibration.deltas, cfg.calibration.ns,
          cfg.calibration.reps, cfg.calibration.seed);
      c = std::max(c, r.c);
      calibrations.push_back(calibration_to_json(r));
    }
    p.lcb.c = c;
  }
  const ContinuumOptimum cont = continuum_optimal_cost(cfg.source, cfg.spec, cfg.policy.net_eta);

  p.oracle["policy"] = cfg.policy.name;
  p.oracle["gaps"] = gaps_to_json(p.gaps);
  p.oracle["eta_used"] = p.lcb.eta;
  p.oracle["c_used"] = p.lcb.c;
  if (!calibrations.empty()) p.oracle["calibration"] = calibrations;
  p.oracle["gamma"] = gamma.gamma;
  p.oracle["epsilon_star"] = gamma.epsilon_star;
  p.oracle["max_matches"] = gamma.max_matches;
  p.oracle["net_size"] = net.points.size();
  p.oracle["net_beta"] = net.beta;
  p.oracle["net_refinements"] = net.refinements;
  p.oracle["lemma_cardinality"] = net.lemma_cardinality;
  p.oracle["continuum_cost"] = cont.cost_bits;
  p.oracle["continuum_pmf"] = cont.pmf;
  p.oracle["continuum_clamped"] = cont.clamped;
  p.oracle["approx_per_round"] = std::max(0.0, p.gaps.r_star - cont.cost_bits);

  if (net_out) *net_out = std::move(net);
  if (gamma_out) *gamma_out = gamma;
  if (cont_out) *cont_out = cont;
  return p;
}

// Reference cost for NTS regret: the best action in the policy's own class
// (type mixtures for v1; floored memoryless distributions otherwise, with a
// fine per-symbol grid when V is binary).
double nts_reference_cost(const ExperimentConfig& cfg, json* oracle) {
  const NtsVariant variant = cfg.policy.kind == PolicyKind::kNtsV1 ? NtsVariant::kUniformMixture
                             : cfg.policy.kind == PolicyKind::kNtsV2
                                 ? NtsVariant::kMyopic
                                 : NtsVariant::kAveraged;
  double best = std::numeric_limits<double>::infinity();
  std::string best_desc;
  auto consider = [&](const ReconDistribution& q) {
    if (expected_bits_lower_bound(q, cfg.source, cfg.spec) >= best) return;
    const double cost = expected_bits(q, cfg.source, cfg.spec, cfg.series_tol).average;
    if (cost < best) {
      best = cost;
      best_desc = q.describe();
    }
  };
  if (cfg.policy.reference_types) {
    for (const auto& q : nts_reference_actions(variant, cfg.spec, cfg.policy.smoothing_floor)) {
      consider(q);
    }
  }
  if (variant != NtsVariant::kUniformMixture && cfg.spec.v_size() == 2) {
    // coarse-to-fine grid over binary per-symbol laws
    const double f = cfg.policy.smoothing_floor;
    double best_q0 = 0.5;
    double prev_best = best;
    for (double q0 = f; q0 <= 1.0 - f + 1e-12; q0 += 1e-2) {
      consider(ReconDistribution::memoryless({q0, 1.0 - q0}, cfg.spec.length()));
      if (best < prev_best) {
        best_q0 = q0;
        prev_best = best;
      }
    }
    const double lo = std::max(f, best_q0 - 2e-2), hi = std::min(1.0 - f, best_q0 + 2e-2);
    for (double q0 = lo; q0 <= hi + 1e-12; q0 += 1e-3) {
      consider(ReconDistribution::memoryless({q0, 1.0 - q0}, cfg.spec.length()));
    }
  }
  if (oracle) {
    (*oracle)["reference_cost"] = best;
    (*oracle)["reference_action"] = best_desc;
  }
  return best;
}

struct NtsSeedOutput {
  PolicyTrace trace;
  std::vector<double> regret;
  json actions;  // id -> {raw, used, cost, gap}
};

NtsSeedOutput run_nts_seed(const ExperimentConfig& cfg, std::uint64_t seed, double r_ref) {
  NtsConfig nts;
  nts.variant = cfg.policy.kind == PolicyKind::kNtsV1 ? NtsVariant::kUniformMixture
                : cfg.policy.kind == PolicyKind::kNtsV2 ? NtsVariant::kMyopic
                                                        : NtsVariant::kAveraged;
  nts.k = cfg.policy.k;
  nts.initial_per_symbol = cfg.policy.initial_per_symbol;
  nts.smoothing_floor = cfg.policy.smoothing_floor;

  NtsSeedOutput out;
  NtsEpisodeResult ep = run_nts_episode(cfg.source, cfg.spec, nts, cfg.horizon, seed, cfg.j_max);
  // gaps against the reference optimum, by distinct action
  std::vector<double> gaps(ep.actions.size());
  out.actions = json::array();
  for (std::size_t a = 0; a < ep.actions.size(); ++a) {
    const double cost = expected_bits(ep.actions[a], cfg.source, cfg.spec, cfg.series_tol).average;
    gaps[a] = std::max(0.0, cost - r_ref);
    out.actions.push_back({{"id", a},
                           {"raw", ep.raw_actions[a].describe()},
                           {"used", ep.actions[a].describe()},
                           {"cost", cost},
                           {"gap", gaps[a]}});
  }
  out.regret = pseudo_regret_of_trace(ep.trace, gaps);
  out.trace = std::move(ep.trace);
  return out;
}

json summary_common(const ExperimentConfig& cfg, const std::vector<std::vector<double>>& curves) {
  const std::size_t horizon = curves.front().size();
  double mean = 0.0;
  for (const auto& c : curves) mean += c.back();
  mean /= static_cast<double>(curves.size());
  double var = 0.0;
  for (const auto& c : curves) var += (c.back() - mean) * (c.back() - mean);
  const double stderr_final =
      curves.size() > 1
          ? std::sqrt(var / (static_cast<double>(curves.size()) - 1.0) /
                      static_cast<double>(curves.size()))
          : 0.0;
  json s;
  s["policy"] = cfg.policy.name;
  s["horizon"] = horizon;
  s["num_seeds"] = curves.size();
  s["seeds"] = cfg.seeds;
  s["final_regret_mean"] = mean;
  s["final_regret_stderr"] = stderr_final;
  s["regret_per_log_t"] = horizon > 1 ? mean / std::log(static_cast<double>(horizon)) : 0.0;
  return s;
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  write_json(out / "config.json", cfg.snapshot);

  std::vector<std::vector<double>> curves(cfg.seeds.size());
  json summary;

  switch (cfg.policy.kind) {
    case PolicyKind::kLcb: {
      PreparedBandit p = prepare_lcb(cfg);
      std::vector<PolicyTrace> traces(cfg.seeds.size());
      parallel_for(cfg.seeds.size(), [&](std::size_t i) {
        traces[i] =
            run_lcb_episode(cfg.source, p.arms, cfg.spec, p.lcb, cfg.horizon, cfg.seeds[i]);
        curves[i] = pseudo_regret_of_trace(traces[i], p.gaps.gaps);
      });
      for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        write_trace_csv(out / ("trace_seed" + std::to_string(cfg.seeds[i]) + ".csv"), traces[i],
                        curves[i]);
      }
      write_json(out / "oracle.json", p.oracle);
      {
        std::ostringstream os;
        os << "t,thm1_bound\n";
        for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
          os << t << ',' << format_sig12(regret_bound_thm1(p.gaps.gaps, t, p.lcb)) << '\n';
        }
        write_text(out / "bounds.csv", os.str());
      }
      summary = summary_common(cfg, curves);
      summary["eta"] = p.lcb.eta;
      summary["c"] = p.lcb.c;
      summary["thm1_bound_final"] =
          regret_bound_thm1(p.gaps.gaps, static_cast<double>(cfg.horizon), p.lcb);
      summary["r_star"] = p.gaps.r_star;
      summary["lambda"] = p.gaps.lambda;
      break;
    }
    case PolicyKind::kLipschitz: {
      CoveringNet net;
      GammaReport gamma;
      ContinuumOptimum cont;
      PreparedBandit p = prepare_lipschitz(cfg, &net, &gamma, &cont);
      const double approx = std::max(0.0, p.gaps.r_star - cont.cost_bits);
      std::vector<PolicyTrace> traces(cfg.seeds.size());
      parallel_for(cfg.seeds.size(), [&](std::size_t i) {
        traces[i] =
            run_lcb_episode(cfg.source, p.arms, cfg.spec, p.lcb, cfg.horizon, cfg.seeds[i]);
        curves[i] = pseudo_regret_of_trace(traces[i], p.gaps.gaps);
        for (std::size_t t = 0; t < curves[i].size(); ++t) {
          curves[i][t] += static_cast<double>(t + 1) * approx;  // continuum-referenced
        }
      });
      for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        write_trace_csv(out / ("trace_seed" + std::to_string(cfg.seeds[i]) + ".csv"), traces[i],
                        curves[i]);
      }
      write_json(out / "oracle.json", p.oracle);
      write_json(out / "net.json", json::parse(net_to_json(net)));
      {
        std::ostringstream os;
        os << "t,thm1_bound,thm2_envelope\n";
        for (std::uint64_t t = 1; t <= cfg.horizon; ++t) {
          const double thm1 = regret_bound_thm1(p.gaps.gaps, static_cast<double>(t), p.lcb);
          const double thm2 =
              t >= 2 ? thm2_envelope(gamma.gamma, cfg.spec.y_size(), t) : 0.0;
          os << t << ',' << format_sig12(thm1) << ',' << format_sig12(thm2) << '\n';
        }
        write_text(out / "bounds.csv", os.str());
      }
      summary = summary_common(cfg, curves);
      summary["eta"] = p.lcb.eta;
      summary["c"] = p.lcb.c;
      summary["net_size"] = net.points.size();
      summary["epsilon_star"] = gamma.epsilon_star;
      summary["gamma"] = gamma.gamma;
      summary["approx_per_round"] = approx;
      summary["continuum_cost"] = cont.cost_bits;
      summary["thm2_envelope_final"] =
          thm2_envelope(gamma.gamma, cfg.spec.y_size(), cfg.horizon);
      break;
    }
    default: {
      json oracle;
      oracle["policy"] = cfg.policy.name;
      const double r_ref = nts_reference_cost(cfg, &oracle);
      std::vector<NtsSeedOutput> outs(cfg.seeds.size());
      parallel_for(cfg.seeds.size(), [&](std::size_t i) {
        outs[i] = run_nts_seed(cfg, cfg.seeds[i], r_ref);
        curves[i] = outs[i].regret;
      });
      for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
        const std::string tag = std::to_string(cfg.seeds[i]);
        write_trace_csv(out / ("trace_seed" + tag + ".csv"), outs[i].trace, curves[i]);
        json actions;
        actions["actions"] = outs[i].actions;
        write_json(out / ("actions_seed" + tag + ".json"), actions);
      }
      // KL regret bound needs the rate-distortion optimum of the scenario
      if (cfg.source.product_structure() && cfg.spec.additive_form() &&
          cfg.policy.kind != PolicyKind::kNtsV1) {
        const auto& ps = *cfg.source.product_structure();
        const auto ba = blahut_arimoto_fixed_distortion(
            ps.per_symbol_pmf, cfg.spec.per_symbol_table(),
            cfg.spec.level() / static_cast<double>(cfg.spec.length()));
        oracle["ba_rate_per_symbol"] = ba.rate_bits;
        oracle["ba_q_star"] = ba.q_star;
        const std::vector<double> q1 = cfg.policy.initial_per_symbol.empty()
                                           ? std::vector<double>(cfg.spec.v_size(),
                                                                 1.0 / cfg.spec.v_size())
                                           : cfg.policy.initial_per_symbol;
        oracle["nts_kl_bound"] = nts_regret_bound(q1, ba.q_star);
        summary["nts_kl_bound"] = oracle["nts_kl_bound"];
      }
      write_json(out / "oracle.json", oracle);
      json s = summary_common(cfg, curves);
      for (auto it = s.begin(); it != s.end(); ++it) summary[it.key()] = it.value();
      summary["reference_cost"] = r_ref;
      break;
    }
  }

  write_regret_csv(out / "regret.csv", curves);
  write_json(out / "summary.json", summary);
}

void write_oracle_only(const ExperimentConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const fs::path out(out_dir);
  switch (cfg.policy.kind) {
    case PolicyKind::kLcb:
      write_json(out / "oracle.json", prepare_lcb(cfg).oracle);
      break;
    case PolicyKind::kLipschitz:
      write_json(out / "oracle.json", prepare_lipschitz(cfg, nullptr, nullptr, nullptr).oracle);
      break;
    default: {
      json oracle;
      oracle["policy"] = cfg.policy.name;
      nts_reference_cost(cfg, &oracle);
      write_json(out / "oracle.json", oracle);
      break;
    }
  }
}

void write_net_only(const ExperimentConfig& cfg, const std::string& out_dir) {
  if (cfg.policy.kind != PolicyKind::kLipschitz) {
    throw std::invalid_argument("net dump requires the lipschitz policy");
  }
  fs::create_directories(out_dir);
  const GammaReport gamma =
      gamma_and_epsilon(cfg.spec, cfg.policy.net_eta, cfg.policy.lambda, cfg.horizon);
  const CoveringNet net = build_net(cfg.policy.net_eta, gamma.epsilon_star, cfg.spec);
  write_json(fs::path(out_dir) / "net.json", json::parse(net_to_json(net)));
}

std::string emit_report(const std::string& dir) {
  std::vector<fs::path> runs;
  if (fs::exists(fs::path(dir) / "summary.json")) {
    runs.push_back(dir);
  } else {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_directory() && fs::exists(entry.path() / "summary.json")) {
        runs.push_back(entry.path());
      }
    }
    std::sort(runs.begin(), runs.end());
  }
  if (runs.empty()) throw std::runtime_error("no completed runs under " + dir);

  const std::vector<std::string> columns = {
      "run",           "policy",       "horizon",          "num_seeds",
      "final_regret_mean", "final_regret_stderr", "regret_per_log_t", "thm1_bound_final",
      "thm2_envelope_final", "nts_kl_bound"};
  std::ostringstream csv, table;
  for (std::size_t c = 0; c < columns.size(); ++c) csv << (c ? "," : "") << columns[c];
  csv << '\n';

  std::vector<std::vector<std::string>> rows;
  for (const auto& run : runs) {
    std::ifstream f(run / "summary.json");
    json s;
    f >> s;
    std::vector<std::string> row;
    row.push_back(run.filename().string());
    for (std::size_t c = 1; c < columns.size(); ++c) {
      const auto it = s.find(columns[c]);
      if (it == s.end()) {
        row.push_back("-");
      } else if (it->is_number_float()) {
        row.push_back(format_sig12(it->get<double>()));
      } else {
        row.push_back(it->dump());
      }
    }
    rows.push_back(std::move(row));
  }
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) csv << (c ? "," : "") << row[c];
    csv << '\n';
  }
  write_text(fs::path(dir) / "report.csv", csv.str());

  std::vector<std::size_t> widths(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    widths[c] = columns[c].size();
    for (const auto& row : rows) widths[c] = std::max(widths[c], row[c].size());
  }
  auto emit_row = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      table << cells[c] << std::string(widths[c] - cells[c].size() + 2, ' ');
    }
    table << '\n';
  };
  emit_row(columns);
  for (const auto& row : rows) emit_row(row);
  return table.str();
}

}  // namespace banditlc
