#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "legmpc/gait.hpp"
#include "legmpc/terrain.hpp"
#include "legmpc/types.hpp"

namespace legmpc {

struct FootholdPrediction {
  int leg = 0;
  double dt = 0.0;
  Vec3 ellipse_center = Vec3::Zero();
  Vec3 step_length = Vec3::Zero();
  Vec3 position = Vec3::Zero();
};

/// p = center + step_length / 2 + dt * base_velocity. Throws for dt < 0.
FootholdPrediction predict_foothold(int leg, const Vec3& ellipse_center, const Vec3& step_length,
                                    double dt, const Vec3& base_velocity);

/// Cost weights and safety rules of the exhaustive foothold evaluator.
/// Defaults are configuration, not calibrated values.
struct FootholdConfig {
  double crop_half_extent = 0.30;
  double w_collision = 1.0;
  double w_roughness = 1.0;
  double w_adjustment = 0.25;
  double edge_margin = 0.04;
  double edge_threshold = 0.05;  // height jump treated as a discontinuity
  double reach_radius = 0.35;
  double swing_apex_height = 0.10;
};

struct SwingGeometry {
  Vec3 origin = Vec3::Zero();  // lift-off position
  double apex_height = 0.10;
};

struct ReachLimit {
  Vec2 center = Vec2::Zero();  // hip projection at touchdown
  double radius = 0.35;
};

struct FootholdChoice {
  CellIndex cell;
  Vec3 position = Vec3::Zero();  // cell center, z = terrain height
  Vec2 adjustment = Vec2::Zero();
  double cost = 0.0;
  std::vector<double> scores;  // row-major over the crop, +inf where rejected
  int grid_side = 0;
};

class NoSafeFoothold : public std::runtime_error {
 public:
  explicit NoSafeFoothold(const std::string& what, int leg = -1, int stance_change = -1)
      : std::runtime_error(what), leg(leg), stance_change(stance_change) {}
  int leg;
  int stance_change;
};

/// Scores every cell of the crop and returns the cheapest one. Rejected cells:
/// unknown, within edge_margin of a height discontinuity or an unknown cell,
/// too close to the crop border to inspect that margin, or outside `reach`.
/// Ties go to the lowest row-major index. Throws NoSafeFoothold if every cell
/// is rejected, std::invalid_argument if `nominal` is outside the crop.
FootholdChoice evaluate_foothold(const HeightMap& crop, const CellIndex& nominal,
                                 const SwingGeometry& swing, const FootholdConfig& config,
                                 const std::optional<ReachLimit>& reach = std::nullopt);

/// Kinematic state needed to predict footholds.
struct BaseKinematics {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double yaw = 0.0;
};

struct ContactEntry {
  Vec3 position = Vec3::Zero();
  Vec3 predicted = Vec3::Zero();  // predicted touchdown before adjustment
  Vec2 adjustment = Vec2::Zero();
  double score = 0.0;
  bool touchdown = false;  // this leg touches down at this stance change
};

/// Per-leg contact locations at every stance change of a schedule.
struct ContactSequence {
  std::vector<std::array<ContactEntry, kNumLegs>> entries;  // indexed by stance change

  const Vec3& at(int stance_change, int leg) const {
    return entries.at(static_cast<std::size_t>(stance_change))[static_cast<std::size_t>(leg)]
        .position;
  }
  FootPositions feet_at(int stance_change) const;
  /// Stance change index of the first touchdown of `leg`, or -1.
  int first_touchdown(int leg) const;
};

/// Nominal foot positions relative to the base, yaw frame (hip plus lateral offset).
using NominalStance = std::array<Vec2, kNumLegs>;

struct ContactSequenceInput {
  BaseKinematics base;
  FootPositions current_feet;  // stance feet, or last lift-off point for swing legs
  Vec2 commanded_velocity = Vec2::Zero();  // heading frame
  NominalStance nominal_stance{};
};

/// Called for every evaluated touchdown with the crop and the full score grid.
using FootholdObserver =
    std::function<void(int stance_change, int leg, const HeightMap& crop, const FootholdChoice& choice)>;

/// Predicts and adjusts every touchdown over the schedule. Throws
/// NoSafeFoothold identifying leg and stance change.
ContactSequence build_contact_sequence(const ContactSequenceInput& input,
                                       const ContactSchedule& schedule, const HeightMap& map,
                                       const GaitParams& gait, const FootholdConfig& config,
                                       const FootholdObserver& observer = {});

}  // namespace legmpc
