#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "banditlc/experiment.hpp"

using namespace banditlc;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json s0_lcb_config() {
  return json::parse(R"({
    "scenario": {
      "source": {"pmf": [0.8, 0.2]},
      "distortion": {"kind": "hamming", "level": 0}
    },
    "policy": {"name": "lcb", "alpha": 2.1, "c": 0.5, "eta": "oracle"},
    "arms": [{"categorical": [0.8, 0.2]}, {"categorical": [0.2, 0.8]}],
    "horizon": 60,
    "seeds": [0, 1],
    "j_max": 1048576
  })");
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config validation") {
  auto cfg = s0_lcb_config();
  CHECK_NOTHROW(parse_config(cfg));

  SUBCASE("alpha must exceed 2") {
    cfg["policy"]["alpha"] = 2.0;
    CHECK_THROWS_WITH_AS(parse_config(cfg),
                         "config error at /policy/alpha: alpha must exceed 2",
                         std::invalid_argument);
  }
  SUBCASE("unknown keys are rejected") {
    cfg["extra"] = 1;
    CHECK_THROWS(parse_config(cfg));
  }
  SUBCASE("unknown nested keys are rejected") {
    cfg["policy"]["mystery"] = true;
    CHECK_THROWS(parse_config(cfg));
  }
  SUBCASE("unknown policy name") {
    cfg["policy"]["name"] = "ucb";
    CHECK_THROWS(parse_config(cfg));
  }
  SUBCASE("arm alphabet must match") {
    cfg["arms"][0] = {{"categorical", {0.2, 0.3, 0.5}}};
    CHECK_THROWS(parse_config(cfg));
  }
  SUBCASE("empty seeds") {
    cfg["seeds"] = json::array();
    CHECK_THROWS(parse_config(cfg));
  }
  SUBCASE("nts-v3 window parse") {
    cfg["policy"] = {{"name", "nts-v3:k=25"}};
    cfg.erase("arms");
    cfg["scenario"]["source"] = {{"per_symbol_pmf", {0.7, 0.3}}, {"length", 4}};
    cfg["scenario"]["distortion"] = {{"kind", "hamming"}, {"level", 1}};
    const auto parsed = parse_config(cfg);
    CHECK(parsed.policy.kind == PolicyKind::kNtsV3);
    CHECK(parsed.policy.k == 25);
  }
}

TEST_CASE("parse errors carry line and column") {
  TempDir tmp("banditlc_cfg_err");
  const fs::path bad = tmp.path / "bad.json";
  std::ofstream(bad) << "{\n  \"scenario\": {\n";
  try {
    load_config(bad.string());
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
}

TEST_CASE("lcb run writes the full artifact set deterministically") {
  TempDir tmp("banditlc_run");
  const auto cfg = parse_config(s0_lcb_config());
  const std::string out1 = (tmp.path / "a").string();
  const std::string out2 = (tmp.path / "b").string();
  run_experiment(cfg, out1);
  run_experiment(cfg, out2);

  for (const char* name :
       {"config.json", "oracle.json", "regret.csv", "bounds.csv", "summary.json",
        "trace_seed0.csv", "trace_seed1.csv"}) {
    CAPTURE(name);
    REQUIRE(fs::exists(fs::path(out1) / name));
    CHECK(slurp(fs::path(out1) / name) == slurp(fs::path(out2) / name));
  }

  // regret columns are nondecreasing per seed
  std::ifstream trace(fs::path(out1) / "trace_seed0.csv");
  std::string line;
  std::getline(trace, line);
  CHECK(line == "t,action,cost_bits_idealized,emitted_bits,escaped,cum_pseudo_regret");
  double prev = -1.0;
  while (std::getline(trace, line)) {
    const auto pos = line.rfind(',');
    const double cum = std::stod(line.substr(pos + 1));
    CHECK(cum >= prev);
    prev = cum;
  }

  // the bounds column equals a direct evaluation at the final horizon
  const json summary = json::parse(slurp(fs::path(out1) / "summary.json"));
  const json oracle = json::parse(slurp(fs::path(out1) / "oracle.json"));
  LcbConfig lcb;
  lcb.alpha = 2.1;
  lcb.c = summary["c"].get<double>();
  lcb.eta = summary["eta"].get<double>();
  const auto gaps = oracle["gaps"]["gaps"].get<std::vector<double>>();
  const double expected = regret_bound_thm1(gaps, 60.0, lcb);
  CHECK(summary["thm1_bound_final"].get<double>() ==
        doctest::Approx(canonical12(expected)).epsilon(1e-9));

  // report renders one row per run directory
  const std::string table = emit_report(tmp.path.string());
  CHECK(table.find("a") != std::string::npos);
  CHECK(table.find("b") != std::string::npos);
  CHECK(fs::exists(tmp.path / "report.csv"));
}

TEST_CASE("nts run emits actions and the kl bound") {
  json cfg = json::parse(R"({
    "scenario": {
      "source": {"per_symbol_pmf": [0.7, 0.3], "length": 4},
      "distortion": {"kind": "hamming", "level": 1}
    },
    "policy": {"name": "nts-v2", "initial_per_symbol": [0.5, 0.5]},
    "horizon": 80,
    "seeds": [3]
  })");
  TempDir tmp("banditlc_nts");
  run_experiment(parse_config(cfg), tmp.path.string());
  CHECK(fs::exists(tmp.path / "trace_seed3.csv"));
  CHECK(fs::exists(tmp.path / "actions_seed3.json"));
  const json summary = json::parse(slurp(tmp.path / "summary.json"));
  CHECK(summary.contains("nts_kl_bound"));
  CHECK(summary["nts_kl_bound"].get<double>() >= 0.0);
  const json oracle = json::parse(slurp(tmp.path / "oracle.json"));
  CHECK(oracle.contains("ba_q_star"));
}

TEST_CASE("lipschitz run and net dump") {
  json cfg = json::parse(R"({
    "scenario": {
      "source": {"pmf": [0.8, 0.2]},
      "distortion": {"kind": "hamming", "level": 0}
    },
    "policy": {"name": "lipschitz", "alpha": 2.1, "c": 0.5, "net_eta": 0.1, "lambda": 1.0},
    "horizon": 120,
    "seeds": [0]
  })");
  TempDir tmp("banditlc_lip");
  const auto parsed = parse_config(cfg);
  run_experiment(parsed, tmp.path.string());
  CHECK(fs::exists(tmp.path / "net.json"));
  const json summary = json::parse(slurp(tmp.path / "summary.json"));
  CHECK(summary["net_size"].get<int>() >= 1);
  CHECK(summary.contains("thm2_envelope_final"));

  TempDir tmp2("banditlc_netonly");
  write_net_only(parsed, tmp2.path.string());
  CHECK(fs::exists(tmp2.path / "net.json"));
}

TEST_CASE("escape-enabled lcb run over type-class arms") {
  json cfg = json::parse(R"({
    "scenario": {
      "source": {"per_symbol_pmf": [0.7, 0.3], "length": 4},
      "distortion": {"kind": "hamming", "level": 1}
    },
    "policy": {"name": "lcb", "alpha": 2.1, "c": 1.0, "eta": 0.15, "allow_escape_arms": true},
    "arms": [
      {"uniform_on_type": [4, 0]},
      {"uniform_on_type": [2, 2]},
      {"uniform_on_type": [0, 4]}
    ],
    "horizon": 120,
    "seeds": [0],
    "j_max": 512
  })");
  TempDir tmp("banditlc_escape");
  run_experiment(parse_config(cfg), tmp.path.string());
  const json oracle = json::parse(slurp(tmp.path / "oracle.json"));
  CHECK(oracle["gaps"]["eta_has_zero"].get<bool>());
  for (const auto& c : oracle["gaps"]["cost"]) CHECK(c.get<double>() < 100.0);
  // escapes actually occur and are flagged in the trace
  std::ifstream trace(tmp.path / "trace_seed0.csv");
  std::string line;
  std::getline(trace, line);
  int escapes = 0;
  while (std::getline(trace, line)) {
    const auto a = line.find(',', line.find(',', line.find(',') + 1) + 1);
    escapes += line[a + 1] == '1' ? 1 : 0;
  }
  CHECK(escapes > 0);

  SUBCASE("escape mode requires explicit eta") {
    cfg["policy"].erase("eta");
    CHECK_THROWS(parse_config(cfg));
  }
}

TEST_CASE("oracle-only entry point") {
  TempDir tmp("banditlc_oracle");
  write_oracle_only(parse_config(s0_lcb_config()), tmp.path.string());
  const json oracle = json::parse(slurp(tmp.path / "oracle.json"));
  CHECK(oracle["gaps"]["a_star"].get<int>() == 0);
  CHECK(oracle["gaps"]["eta"].get<double>() == doctest::Approx(0.2));
}

TEST_CASE("12-digit float format is stable") {
  CHECK(format_sig12(0.0) == "0.00000000000e+00");
  CHECK(format_sig12(1.5) == "1.50000000000e+00");
  CHECK(canonical12(0.1 + 0.2) == canonical12(0.3));
}
