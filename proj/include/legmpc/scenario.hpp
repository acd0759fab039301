#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "legmpc/sim.hpp"

namespace legmpc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Ablation { None, Mpc, Ic };

Ablation parse_ablation(const std::string& s);
const char* to_string(Ablation a);
ControllerMode mode_for(Ablation a);

struct ScenarioSpec {
  std::string name;
  std::filesystem::path terrain_file;  // resolved against the scenario directory
  GaitParams gait = GaitParams::trot();
  std::vector<CommandKey> command;
  double duration = 0.0;
  std::vector<Disturbance> disturbances;
  Ablation ablation = Ablation::None;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;  // resolved against the working directory
  std::optional<double> goal_x;
  double position_noise = 0.0;
  Vec2 start_xy = Vec2::Zero();
  double start_yaw = 0.0;
};

/// Reads a scenario from a JSON file or from `scenario.json` inside a
/// directory. Throws ConfigError on parse or schema errors and missing files.
ScenarioSpec load_scenario(const std::filesystem::path& path);
ScenarioSpec parse_scenario(const std::string& text, const std::filesystem::path& base_dir);

/// Loads the terrain and fills a SimConfig with library defaults elsewhere.
SimConfig make_sim_config(const ScenarioSpec& spec);

inline constexpr int kSummarySchemaVersion = 1;

/// Summary of a run (see README for the fields). Numbers are rounded to 9
/// significant digits.
nlohmann::json summarize(const ScenarioSpec& spec, const SimLog& log, double tracking_window = 5.0);

/// Round to 9 significant digits.
double round9(double v);

/// Writes ticks.csv, footholds.csv, solves.csv and summary.json into dir.
void write_run(const std::filesystem::path& dir, const nlohmann::json& summary, const SimLog& log);

nlohmann::json read_summary(const std::filesystem::path& dir);

/// Side-by-side table with percentage deltas (b relative to a). Throws
/// ConfigError when scenarios or schema versions differ.
std::string compare_summaries(const nlohmann::json& a, const nlohmann::json& b);

/// Score grid of the foothold evaluation for `leg` at stance change k from
/// the scenario's initial state, as CSV (row, col, x, y, z, score).
std::string dump_scores(const ScenarioSpec& spec, int leg, int stance_change);

}  // namespace legmpc
