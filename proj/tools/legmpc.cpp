#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <spdlog/cfg/env.h>
#include <spdlog/spdlog.h>

#include "legmpc/scenario.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kControllerFailure = 2, kFall = 3 };

int run(const std::string& spec_path, const std::string& ablate, std::optional<std::uint64_t> seed,
        const std::string& out) {
  legmpc::ScenarioSpec spec = legmpc::load_scenario(spec_path);
  if (!ablate.empty()) spec.ablation = legmpc::parse_ablation(ablate);
  if (seed) spec.seed = *seed;
  if (!out.empty()) spec.output_dir = out;
  const legmpc::SimConfig cfg = legmpc::make_sim_config(spec);

  spdlog::info("running {} ({}) for {} s", spec.name, legmpc::to_string(cfg.mode), spec.duration);
  const legmpc::SimLog log = legmpc::run_closed_loop(cfg);
  const nlohmann::json summary = legmpc::summarize(spec, log);
  legmpc::write_run(spec.output_dir, summary, log);
  std::cout << summary.dump(2) << '\n';

  switch (log.outcome) {
    case legmpc::SimOutcome::Completed:
      return kOk;
    case legmpc::SimOutcome::Fall:
      return kFall;
    case legmpc::SimOutcome::ControllerFailure:
      return kControllerFailure;
  }
  return kControllerFailure;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::cfg::load_env_levels();  // SPDLOG_LEVEL=debug etc.

  CLI::App app{"Terrain-aware quadruped MPC simulator"};
  app.require_subcommand(1);

  std::string spec_path, ablate, out;
  std::optional<std::uint64_t> seed;
  auto* run_cmd = app.add_subcommand("run", "run a scenario and write logs and a summary");
  run_cmd->add_option("spec", spec_path, "scenario directory or JSON file")->required();
  run_cmd->add_option("--ablate", ablate, "disable a component")->check(CLI::IsMember({"mpc", "ic"}));
  run_cmd->add_option("--seed", seed, "RNG seed");
  run_cmd->add_option("--out", out, "output directory");

  std::string run_a, run_b;
  auto* cmp_cmd = app.add_subcommand("compare", "compare two run summaries");
  cmp_cmd->add_option("a", run_a, "first run directory")->required();
  cmp_cmd->add_option("b", run_b, "second run directory")->required();

  int leg = 0, stance = 1;
  auto* dump_cmd = app.add_subcommand("dump-scores", "print the foothold score grid as CSV");
  dump_cmd->add_option("spec", spec_path, "scenario directory or JSON file")->required();
  dump_cmd->add_option("--leg", leg, "leg index (0 LF, 1 RF, 2 LH, 3 RH)")->required();
  dump_cmd->add_option("--stance", stance, "stance change index")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run_cmd) return run(spec_path, ablate, seed, out);
    if (*cmp_cmd) {
      std::cout << legmpc::compare_summaries(legmpc::read_summary(run_a), legmpc::read_summary(run_b));
      return kOk;
    }
    if (*dump_cmd) {
      std::cout << legmpc::dump_scores(legmpc::load_scenario(spec_path), leg, stance);
      return kOk;
    }
  } catch (const legmpc::ConfigError& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  } catch (const legmpc::TerrainError& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kConfigError;
  } catch (const legmpc::NoSafeFoothold& e) {
    spdlog::error("{}", e.what());
    return kControllerFailure;
  }
  return kOk;
}
