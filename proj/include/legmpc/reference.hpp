#pragma once

#include <vector>

#include "legmpc/foothold.hpp"
#include "legmpc/gait.hpp"
#include "legmpc/state.hpp"

namespace legmpc {

struct UserCommand {
  Vec2 velocity = Vec2::Zero();  // heading frame, m/s
  double yaw_rate = 0.0;         // rad/s

  /// Throws std::invalid_argument for non-finite values or values above the limits.
  void validate(double max_speed, double max_yaw_rate) const;
};

struct ReferenceConfig {
  double body_height = 0.58;  // above the contact plane, along world z
  double max_speed = 2.0;
  double max_yaw_rate = 2.0;
};

/// Reference pose at one stance change.
struct ReferenceAnchor {
  double t = 0.0;
  EulerZYX angles;
  Vec3 position = Vec3::Zero();
  Vec3 euler_rate = Vec3::Zero();  // filled by rates_from_anchors
  Vec3 velocity = Vec3::Zero();    // idem
};

/// One anchor per schedule entry (index 0 = now). Throws TerrainError when the
/// contacts of some stance change do not span a plane.
std::vector<ReferenceAnchor> anchor_references(const RobotState& state, const UserCommand& command,
                                               const ContactSchedule& schedule,
                                               const ContactSequence& contacts,
                                               const ReferenceConfig& config);

/// Forward differences to the next anchor with a strictly later time; anchors
/// with no such successor repeat the previous rate. Requires >= 2 anchors.
void rates_from_anchors(std::vector<ReferenceAnchor>& anchors);

struct ReferenceTrajectory {
  double period = 0.0;
  std::vector<ReferenceAnchor> anchors;
  /// samples[k] is the reference at t = k * period, k = 0..n. Entry 0 only
  /// serves linearization; the tracked references are 1..n.
  std::vector<StateVec> samples;

  int horizon() const { return static_cast<int>(samples.size()) - 1; }
  EulerZYX angles_at(int k) const {
    return EulerZYX::from_vec(samples.at(static_cast<std::size_t>(k)).segment<3>(sx::kAngles));
  }
  Vec3 position_at(int k) const {
    return samples.at(static_cast<std::size_t>(k)).segment<3>(sx::kPosition);
  }
};

/// Zero-order hold of the anchors on the grid k * period, k = 0..n, holding the
/// latest anchor with t <= k * period. Throws std::invalid_argument when
/// n * period exceeds `span`.
ReferenceTrajectory resample_zoh(const std::vector<ReferenceAnchor>& anchors, int n, double period,
                                 double span);

/// Roll and pitch of a trunk with heading `yaw` whose z axis is `normal`.
EulerZYX orientation_from_normal(const Vec3& normal, double yaw);

}  // namespace legmpc
