#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "banditlc/lcb.hpp"
#include "banditlc/lipschitz.hpp"
#include "banditlc/model.hpp"
#include "banditlc/nts.hpp"
#include "banditlc/oracle.hpp"

namespace banditlc {

enum class PolicyKind { kLcb, kLipschitz, kNtsV1, kNtsV2, kNtsV3 };

struct PolicySettings {
  PolicyKind kind = PolicyKind::kLcb;
  std::string name;                  // verbatim policy string
  double alpha = 3.0;
  std::optional<double> c;           // absent: calibrate
  std::optional<double> eta;         // absent: oracle-supplied
  double lambda = 1.0;               // lipschitz
  double net_eta = 0.0;              // lipschitz simplex floor
  int k = 1;                         // nts-v3 window
  std::vector<double> initial_per_symbol;  // nts-v2/v3
  double smoothing_floor = 1e-3;
  bool reference_types = true;       // nts regret reference over type actions
  bool allow_escape_arms = false;    // lcb with zero-probability arms; costs
                                     // switch to the truncated escape model
};

struct CalibrationSettings {
  std::vector<double> deltas{0.1, 0.01};
  std::vector<int> ns{10, 100, 1000};
  int reps = 1000;
  std::uint64_t seed = 12345;
};

struct ExperimentConfig {
  SourceModel source;
  DistortionSpec spec;
  PolicySettings policy;
  std::vector<ReconDistribution> arms;  // explicit arms (lcb)
  std::uint64_t horizon = 0;
  std::vector<std::uint64_t> seeds;
  std::uint64_t j_max = kDefaultJMax;
  double series_tol = 1e-9;
  CalibrationSettings calibration;
  std::string output_dir = "out";
  nlohmann::json snapshot;  // canonical config echo
};

// Parses and validates; schema errors carry the offending JSON path, parse
// errors the line and column. Unknown keys are rejected.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const nlohmann::json& j);

// Runs every seed (bounded worker pool) and writes, per seed,
// trace_seed<k>.csv, plus regret.csv (mean +/- stderr per round),
// oracle.json, bounds.csv and summary.json. Byte-identical for identical
// (config, seed): floats are printed with 12 significant digits and no
// wall-clock state enters any artifact.
void run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// Oracle-only and net-only entry points (CLI subcommands).
void write_oracle_only(const ExperimentConfig& cfg, const std::string& out_dir);
void write_net_only(const ExperimentConfig& cfg, const std::string& out_dir);

// Cross-run comparison over run directories below `dir` (or `dir` itself);
// writes report.csv there and returns the rendered table.
std::string emit_report(const std::string& dir);

// Fixed 12-significant-digit scientific float format used by all artifacts.
std::string format_sig12(double v);
// Round-trips a double through the 12-digit format (canonical JSON floats).
double canonical12(double v);

}  // namespace banditlc
