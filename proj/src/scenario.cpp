#include "legmpc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <fmt/format.h>

namespace legmpc {

using nlohmann::json;

namespace {

Vec2 vec2_of(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(std::string(what) + " must be [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Vec3 vec3_of(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(what) + " must be [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

double percentile(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string pct(double a, double b) {
  if (a == b) return "0%";
  if (a == 0.0) return "n/a";
  return fmt::format("{:+.1f}%", 100.0 * (b - a) / std::abs(a));
}

}  // namespace

Ablation parse_ablation(const std::string& s) {
  if (s == "none" || s.empty()) return Ablation::None;
  if (s == "mpc") return Ablation::Mpc;
  if (s == "ic") return Ablation::Ic;
  throw ConfigError("unknown ablation '" + s + "' (expected none, mpc or ic)");
}

const char* to_string(Ablation a) {
  switch (a) {
    case Ablation::None:
      return "none";
    case Ablation::Mpc:
      return "mpc";
    case Ablation::Ic:
      return "ic";
  }
  return "unknown";
}

ControllerMode mode_for(Ablation a) {
  switch (a) {
    case Ablation::Mpc:
      return ControllerMode::Qp;
    case Ablation::Ic:
      return ControllerMode::Mpc;
    case Ablation::None:
      break;
  }
  return ControllerMode::MpcIc;
}

ScenarioSpec parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario parse error: ") + e.what());
  }
  ScenarioSpec s;
  try {
    const int version = doc.value("schema_version", 1);
    if (version != 1) throw ConfigError("unsupported scenario schema_version " + std::to_string(version));
    s.name = doc.at("name").get<std::string>();
    s.terrain_file = base_dir / doc.at("terrain").get<std::string>();
    if (!std::filesystem::exists(s.terrain_file)) {
      throw ConfigError("terrain file not found: " + s.terrain_file.string());
    }
    if (doc.contains("gait")) {
      const json& g = doc["gait"];
      s.gait.duty_factor = g.value("duty_factor", s.gait.duty_factor);
      s.gait.step_frequency = g.value("step_frequency", s.gait.step_frequency);
      if (g.contains("phase_offsets")) {
        const auto off = g["phase_offsets"].get<std::vector<double>>();
        if (off.size() != kNumLegs) throw ConfigError("gait.phase_offsets needs 4 entries");
        std::copy(off.begin(), off.end(), s.gait.phase_offsets.begin());
      }
    }
    for (const json& k : doc.value("command", json::array())) {
      s.command.push_back({k.at("t").get<double>(), vec2_of(k.at("velocity"), "command.velocity"),
                           k.value("yaw_rate", 0.0)});
    }
    s.duration = doc.at("duration").get<double>();
    if (!(s.duration > 0.0)) throw ConfigError("duration must be positive");
    for (const json& d : doc.value("disturbances", json::array())) {
      Disturbance dist;
      dist.start = d.at("start").get<double>();
      dist.duration = d.at("duration").get<double>();
      if (d.contains("force")) dist.force = vec3_of(d["force"], "disturbance.force");
      if (d.contains("torque")) dist.torque = vec3_of(d["torque"], "disturbance.torque");
      s.disturbances.push_back(dist);
    }
    s.ablation = parse_ablation(doc.value("ablation", std::string("none")));
    s.seed = doc.value("seed", std::uint64_t{0});
    s.output_dir = doc.value("output_dir", std::string("out/") + s.name);
    if (doc.contains("goal_x")) s.goal_x = doc["goal_x"].get<double>();
    s.position_noise = doc.value("position_noise", 0.0);
    if (doc.contains("start")) {
      s.start_xy = vec2_of(doc["start"].at("xy"), "start.xy");
      s.start_yaw = doc["start"].value("yaw", 0.0);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario schema error: ") + e.what());
  }
  return s;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  const std::filesystem::path file =
      std::filesystem::is_directory(path) ? path / "scenario.json" : path;
  return parse_scenario(read_file(file), file.parent_path());
}

SimConfig make_sim_config(const ScenarioSpec& spec) {
  SimConfig c;
  try {
    c.terrain = load_heightmap(spec.terrain_file);
  } catch (const TerrainError& e) {
    throw ConfigError(e.what());
  }
  c.duration = spec.duration;
  c.command = spec.command;
  c.disturbances = spec.disturbances;
  c.planner.gait = spec.gait;
  c.mode = mode_for(spec.ablation);
  c.seed = spec.seed;
  c.position_noise = spec.position_noise;
  c.start_xy = spec.start_xy;
  c.start_yaw = spec.start_yaw;
  c.goal_x = spec.goal_x;
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

double round9(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(fmt::format("{:.9g}", v));
}

json summarize(const ScenarioSpec& spec, const SimLog& log, double tracking_window) {
  json s;
  s["schema_version"] = kSummarySchemaVersion;
  s["scenario"] = spec.name;
  s["ablation"] = to_string(spec.ablation);
  s["controller"] = to_string(mode_for(spec.ablation));
  s["seed"] = spec.seed;
  s["outcome"] = to_string(log.outcome);
  s["message"] = log.message;
  s["fall"] = log.outcome == SimOutcome::Fall;
  s["completed"] = log.outcome == SimOutcome::Completed && (!spec.goal_x || log.goal_reached);
  s["goal_reached"] = log.goal_reached;
  s["end_time"] = round9(log.end_time);

  // Velocity tracking over the final window, against the command in the heading frame.
  double sum_vx = 0.0, sum_cmd = 0.0, sq = 0.0;
  int n = 0;
  const double from = log.end_time - tracking_window;
  for (const TickRecord& r : log.ticks) {
    if (r.t < from) continue;
    const UserCommand c = command_at(spec.command, r.t);
    const double cy = std::cos(r.angles.yaw), sy = std::sin(r.angles.yaw);
    const Vec2 v_heading(cy * r.velocity.x() + sy * r.velocity.y(), -sy * r.velocity.x() + cy * r.velocity.y());
    sum_vx += v_heading.x();
    sum_cmd += c.velocity.x();
    sq += (v_heading - c.velocity).squaredNorm();
    ++n;
  }
  json vel;
  vel["window"] = round9(tracking_window);
  vel["mean_forward"] = round9(n ? sum_vx / n : 0.0);
  vel["mean_command"] = round9(n ? sum_cmd / n : 0.0);
  vel["mean_error"] = round9(n ? std::abs(sum_vx - sum_cmd) / n : 0.0);
  vel["rms_error"] = round9(n ? std::sqrt(sq / n) : 0.0);
  s["velocity"] = vel;

  json legs = json::object();
  for (int i = 0; i < kNumLegs; ++i) {
    double ss = 0.0, mx = 0.0;
    int count = 0;
    for (const FootholdEvent& e : log.footholds) {
      if (e.leg != i) continue;
      ss += e.error * e.error;
      mx = std::max(mx, std::abs(e.error));
      ++count;
    }
    legs[leg_name(i)] = {{"rms_e", round9(count ? std::sqrt(ss / count) : 0.0)},
                         {"max_e", round9(mx)},
                         {"touchdowns", count}};
  }
  s["foothold_error"] = legs;

  std::vector<double> ms;
  double violation = 0.0;
  for (const SolveRecord& r : log.solves) {
    ms.push_back(r.solve_ms);
    violation = std::max(violation, r.violation);
  }
  double mean = 0.0;
  for (double m : ms) mean += m / static_cast<double>(ms.size());
  s["mpc_solve_ms"] = {{"count", ms.size()},
                       {"mean", round9(mean)},
                       {"p95", round9(percentile(ms, 0.95))},
                       {"max", round9(ms.empty() ? 0.0 : *std::max_element(ms.begin(), ms.end()))}};
  s["max_constraint_violation"] = round9(violation);
  s["max_edge_violation"] = round9(log.max_edge_violation);
  if (!log.ticks.empty()) {
    const Vec3 d = log.ticks.back().position - log.ticks.front().position;
    s["com_displacement_xy"] = round9(d.head<2>().norm());
  }
  return s;
}

void write_run(const std::filesystem::path& dir, const json& summary, const SimLog& log) {
  std::filesystem::create_directories(dir);
  log.write_ticks_csv(dir / "ticks.csv");
  log.write_footholds_csv(dir / "footholds.csv");
  log.write_solves_csv(dir / "solves.csv");
  std::ofstream out(dir / "summary.json");
  if (!out) throw std::runtime_error("cannot write " + (dir / "summary.json").string());
  out << summary.dump(2) << '\n';
}

json read_summary(const std::filesystem::path& dir) {
  const std::filesystem::path file =
      std::filesystem::is_directory(dir) ? dir / "summary.json" : dir;
  try {
    return json::parse(read_file(file));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("summary parse error: ") + e.what());
  }
}

std::string compare_summaries(const json& a, const json& b) {
  try {
    if (a.at("schema_version") != b.at("schema_version")) {
      throw ConfigError("summary schema versions differ");
    }
    if (a.at("scenario") != b.at("scenario")) {
      throw ConfigError("scenarios differ: " + a["scenario"].get<std::string>() + " vs " +
                        b["scenario"].get<std::string>());
    }
    std::ostringstream os;
    const auto row = [&](const std::string& label, double x, double y) {
      os << fmt::format("{:<22}{:>14.9g}{:>14.9g}{:>10}\n", label, x, y, pct(x, y));
    };
    os << fmt::format("scenario {}: a = {} ({}), b = {} ({})\n", a["scenario"].get<std::string>(),
                      a["controller"].get<std::string>(), a["outcome"].get<std::string>(),
                      b["controller"].get<std::string>(), b["outcome"].get<std::string>());
    os << fmt::format("{:<22}{:>14}{:>14}{:>10}\n", "metric", "a", "b", "delta");
    for (int i = 0; i < kNumLegs; ++i) {
      const std::string leg = leg_name(i);
      row("RMS(e) " + leg, a["foothold_error"][leg]["rms_e"], b["foothold_error"][leg]["rms_e"]);
      row("max|e| " + leg, a["foothold_error"][leg]["max_e"], b["foothold_error"][leg]["max_e"]);
    }
    row("velocity error", a["velocity"]["mean_error"], b["velocity"]["mean_error"]);
    row("velocity RMS error", a["velocity"]["rms_error"], b["velocity"]["rms_error"]);
    os << fmt::format("completed: a = {}, b = {}\n", a["completed"].get<bool>() ? "yes" : "no",
                      b["completed"].get<bool>() ? "yes" : "no");
    return os.str();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("summary schema error: ") + e.what());
  }
}

std::string dump_scores(const ScenarioSpec& spec, int leg, int stance_change) {
  if (leg < 0 || leg >= kNumLegs) throw ConfigError("leg must be 0..3");
  const SimConfig cfg = make_sim_config(spec);
  const RobotState state = initial_state(cfg);
  const UserCommand cmd = command_at(cfg.command, 0.0);
  const ContactSchedule sched = build_schedule(cfg.planner.gait, 0.0, {});
  if (stance_change < 1 || stance_change >= static_cast<int>(sched.events.size())) {
    throw ConfigError("stance change must be 1.." + std::to_string(sched.events.size() - 1));
  }
  const StanceChange& ev = sched.events[static_cast<std::size_t>(stance_change)];
  if (ev.leg != leg || !ev.touchdown) {
    throw ConfigError(fmt::format("leg {} does not touch down at stance change {}", leg, stance_change));
  }
  std::ostringstream os;
  os << "# legmpc score grid v1\nrow,col,x,y,z,score\n" << std::setprecision(9);
  const ContactSequenceInput in{{state.position, state.velocity, state.angles.yaw},
                                state.feet,
                                cmd.velocity,
                                cfg.planner.nominal_stance};
  build_contact_sequence(in, sched, cfg.terrain, cfg.planner.gait, cfg.planner.foothold,
                         [&](int k, int l, const HeightMap& crop, const FootholdChoice& choice) {
                           if (k != stance_change || l != leg) return;
                           for (int r = 0; r < crop.height(); ++r) {
                             for (int c = 0; c < crop.width(); ++c) {
                               const CellIndex cell{r, c};
                               const Vec2 p = crop.cell_center(cell);
                               const double z = crop.known(cell) ? crop.at(cell) : std::nan("");
                               os << r << ',' << c << ',' << p.x() << ',' << p.y() << ',' << z << ','
                                  << choice.scores[crop.flat_index(cell)]
                                  << '\n';
                             }
                           }
                         });
  return os.str();
}

}  // namespace legmpc
