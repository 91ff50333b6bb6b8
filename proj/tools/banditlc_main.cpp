#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "banditlc/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"bandit-driven backward-adaptive lossy compression simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, report_dir;
  std::vector<std::uint64_t> seed_override;

  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("--config", config_path, "experiment config")->required();
  run->add_option("--seeds", seed_override, "override the config seed list")->delimiter(',');
  run->add_option("--out", out_dir, "output directory (default: config output_dir)");

  auto* report = app.add_subcommand("report", "cross-run comparison table");
  report->add_option("--dir", report_dir, "directory holding completed runs")->required();

  auto* oracle = app.add_subcommand("oracle", "write oracle.json only");
  oracle->add_option("--config", config_path, "experiment config")->required();
  oracle->add_option("--out", out_dir, "output directory (default: config output_dir)");

  auto* net = app.add_subcommand("net", "write the covering net only");
  net->add_option("--config", config_path, "experiment config")->required();
  net->add_option("--out", out_dir, "output directory (default: config output_dir)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (report->parsed()) {
      std::cout << banditlc::emit_report(report_dir);
      return 0;
    }
    banditlc::ExperimentConfig cfg = banditlc::load_config(config_path);
    if (!seed_override.empty()) cfg.seeds = seed_override;
    const std::string target = out_dir.empty() ? cfg.output_dir : out_dir;
    if (run->parsed()) {
      banditlc::run_experiment(cfg, target);
      std::cout << "wrote " << target << "\n";
    } else if (oracle->parsed()) {
      banditlc::write_oracle_only(cfg, target);
      std::cout << "wrote " << target << "/oracle.json\n";
    } else if (net->parsed()) {
      banditlc::write_net_only(cfg, target);
      std::cout << "wrote " << target << "/net.json\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
