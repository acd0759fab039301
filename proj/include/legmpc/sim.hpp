#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "legmpc/compensation.hpp"
#include "legmpc/planner.hpp"
#include "legmpc/swing.hpp"

namespace legmpc {

enum class ControllerMode {
  MpcIc,  // MPC with leg inertia compensation
  Mpc,    // MPC only
  Qp,     // PD trunk control with single-step QP force distribution
};

const char* to_string(ControllerMode m);

/// Command keyframe; the command is interpolated linearly between keyframes
/// and held after the last one.
struct CommandKey {
  double t = 0.0;
  Vec2 velocity = Vec2::Zero();
  double yaw_rate = 0.0;
};

UserCommand command_at(const std::vector<CommandKey>& profile, double t);

/// Constant wrench on the trunk (about the COM, world frame) during [start, start + duration).
struct Disturbance {
  double start = 0.0;
  double duration = 0.0;
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
};

/// Gains of the QP ablation controller (accelerations per unit error).
struct QpAblationGains {
  double velocity_xy = 8.0;  // 1/s
  double height_p = 150.0;   // 1/s^2
  double height_d = 25.0;    // 1/s
  double angle_p = 300.0;    // 1/s^2
  double angle_d = 35.0;     // 1/s
  double torque_weight = 10.0;  // relative to force rows in the distribution QP
  double force_regularization = 1e-6;
};

struct SimConfig {
  double physics_dt = 1e-3;
  double task_rate = 250.0;
  double mpc_rate = 25.0;
  double duration = 10.0;
  std::vector<CommandKey> command;
  std::vector<Disturbance> disturbances;
  HeightMap terrain;
  PlannerConfig planner;
  LegModel legs;
  ControllerMode mode = ControllerMode::MpcIc;
  std::uint64_t seed = 0;
  double position_noise = 0.0;  // std of additive estimation noise on the COM position (m)
  double max_tilt = 0.7;        // rad, roll or pitch beyond this is a fall
  double min_clearance = 0.30;  // m, COM height above terrain below this is a fall
  double retarget_freeze = 0.85;  // swing phase after which targets stay fixed
  Vec2 start_xy = Vec2::Zero();
  double start_yaw = 0.0;
  std::optional<double> goal_x;  // course completed when the COM passes this x
  QpAblationGains qp_gains;

  /// Throws std::invalid_argument when the rates do not nest or values are out of range.
  void validate() const;
  int physics_per_task() const;
  int tasks_per_mpc() const;
};

/// Floating trunk integrated by the plant.
struct TrunkState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 omega = Vec3::Zero();  // world frame
  Mat3 rotation = Mat3::Identity();
  EulerZYX angles;  // re-extracted from rotation, yaw unwrapped
};

/// One semi-implicit Euler step of the rigid trunk: velocities first, then
/// positions, with the rotation advanced by exp([omega dt]). Keeps the full
/// omega x I omega term. Throws SingularOrientation near pitch = +-pi/2.
TrunkState step_physics(const TrunkState& s, const FootPositions& feet,
                        const std::array<Vec3, kNumLegs>& forces, const Wrench& leg_wrench,
                        const Wrench& disturbance, const RobotParams& params, double dt);

struct TickRecord {
  double t = 0.0;
  double gait_phase = 0.0;
  EulerZYX angles;
  Vec3 position = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  EulerZYX ref_angles;
  Vec3 ref_position = Vec3::Zero();
  Vec3 ref_velocity = Vec3::Zero();
  std::array<Vec3, kNumLegs> forces{};
  Wrench w_mpc = Wrench::Zero();
  Wrench w_l = Wrench::Zero();
  Wrench w_d = Wrench::Zero();
  LegFlags stance{};
  std::array<double, kNumLegs> foothold_error{};  // latest e per leg, NaN before the first touchdown
};

struct FootholdEvent {
  int leg = 0;
  double t_liftoff = 0.0;
  double t_touchdown = 0.0;
  Vec3 predicted = Vec3::Zero();  // planned landing at lift-off
  Vec3 landing = Vec3::Zero();
  double error = 0.0;
};

struct SolveRecord {
  double t = 0.0;
  QpStatus status = QpStatus::Optimal;
  int iterations = 0;
  double objective = 0.0;
  double solve_ms = 0.0;
  double violation = 0.0;  // constraint_violation of the plan
  std::array<Vec3, kNumLegs> first{};
};

enum class SimOutcome { Completed, Fall, ControllerFailure };

const char* to_string(SimOutcome o);

struct SimLog {
  std::vector<TickRecord> ticks;
  std::vector<FootholdEvent> footholds;
  std::vector<SolveRecord> solves;
  SimOutcome outcome = SimOutcome::Completed;
  std::string message;
  double end_time = 0.0;
  bool goal_reached = false;
  double max_edge_violation = 0.0;  // deepest landing into an edge margin band (m), 0 if none

  /// Versioned CSV, one line per task tick.
  void write_ticks_csv(const std::filesystem::path& path) const;
  void write_footholds_csv(const std::filesystem::path& path) const;
  /// Per-solve log; wall-clock solve times are left out so the file is reproducible.
  void write_solves_csv(const std::filesystem::path& path) const;
};

inline constexpr const char* kSimLogSchema = "legmpc-simlog-v1";

/// Standing start: feet on the terrain below the nominal footprint, trunk at
/// the configured body height above their mean, level, at rest.
RobotState initial_state(const SimConfig& config);

/// Full closed loop: schedule, contacts, references, MPC (or the QP
/// ablation), leg inertia compensation, force distribution and the plant.
SimLog run_closed_loop(const SimConfig& config);

/// Distance from p to the nearest hard height discontinuity of the map
/// within `search` (infinity if none).
double distance_to_edge(const HeightMap& map, const Vec2& p, double threshold, double search);

}  // namespace legmpc
