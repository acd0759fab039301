#include "legmpc/reference.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "legmpc/terrain.hpp"

namespace legmpc {

void UserCommand::validate(double max_speed, double max_yaw_rate) const {
  if (!velocity.allFinite() || !std::isfinite(yaw_rate)) {
    throw std::invalid_argument("command contains non-finite values");
  }
  if (velocity.norm() > max_speed) throw std::invalid_argument("commanded speed above limit");
  if (std::abs(yaw_rate) > max_yaw_rate) throw std::invalid_argument("yaw rate above limit");
}

EulerZYX orientation_from_normal(const Vec3& normal, double yaw) {
  const Vec3 n = rot_z(-yaw) * normal.normalized();
  EulerZYX e;
  e.roll = -std::asin(std::clamp(n.y(), -1.0, 1.0));
  e.pitch = std::atan2(n.x(), n.z());
  e.yaw = yaw;
  return e;
}

std::vector<ReferenceAnchor> anchor_references(const RobotState& state, const UserCommand& command,
                                               const ContactSchedule& schedule,
                                               const ContactSequence& contacts,
                                               const ReferenceConfig& config) {
  if (contacts.entries.size() != schedule.events.size()) {
    throw std::invalid_argument("contact sequence and schedule differ in length");
  }
  const double yaw = state.angles.yaw;
  const Vec3 velocity_ref = rot_z(yaw) * Vec3(command.velocity.x(), command.velocity.y(), 0.0);

  std::vector<ReferenceAnchor> anchors;
  anchors.reserve(schedule.events.size());
  for (std::size_t k = 0; k < schedule.events.size(); ++k) {
    const double dt = schedule.events[k].dt;
    ReferenceAnchor a;
    a.t = dt;
    const double yaw_ref = yaw + dt * command.yaw_rate;
    a.position = state.position + dt * rot_z(yaw_ref - yaw) * velocity_ref;

    const FootPositions feet = contacts.feet_at(static_cast<int>(k));
    TerrainPlane plane;
    try {
      plane = fit_plane(feet);
    } catch (const TerrainError& e) {
      throw TerrainError("contact plane at stance change " + std::to_string(k) + ": " + e.what());
    }
    a.angles = orientation_from_normal(plane.normal, yaw_ref);
    a.position.z() = plane.centroid.z() + config.body_height;
    anchors.push_back(a);
  }
  return anchors;
}

void rates_from_anchors(std::vector<ReferenceAnchor>& anchors) {
  if (anchors.size() < 2) throw std::invalid_argument("need at least two anchors");
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    std::size_t next = k + 1;
    while (next < anchors.size() && anchors[next].t <= anchors[k].t + kEventTieTolerance) ++next;
    if (next == anchors.size()) {
      if (k > 0) {
        anchors[k].euler_rate = anchors[k - 1].euler_rate;
        anchors[k].velocity = anchors[k - 1].velocity;
      }
      continue;
    }
    const double gap = anchors[next].t - anchors[k].t;
    anchors[k].euler_rate = (anchors[next].angles.vec() - anchors[k].angles.vec()) / gap;
    anchors[k].velocity = (anchors[next].position - anchors[k].position) / gap;
  }
}

ReferenceTrajectory resample_zoh(const std::vector<ReferenceAnchor>& anchors, int n, double period,
                                 double span) {
  if (n < 1) throw std::invalid_argument("horizon must have at least one sample");
  if (!(period > 0.0)) throw std::invalid_argument("sample period must be positive");
  if (anchors.empty()) throw std::invalid_argument("no anchors");
  if (n * period > span + 1e-9) throw std::invalid_argument("horizon exceeds the anchor span");

  ReferenceTrajectory ref;
  ref.period = period;
  ref.anchors = anchors;
  ref.samples.reserve(static_cast<std::size_t>(n) + 1);
  std::size_t current = 0;
  for (int k = 0; k <= n; ++k) {
    const double t = k * period;
    while (current + 1 < anchors.size() && anchors[current + 1].t <= t + kEventTieTolerance) {
      ++current;
    }
    const ReferenceAnchor& a = anchors[current];
    StateVec x;
    x << a.angles.vec(), a.position, euler_rate_map(a.angles) * a.euler_rate, a.velocity,
        gravity_vector();
    ref.samples.push_back(x);
  }
  return ref;
}

}  // namespace legmpc
