#pragma once

#include "legmpc/types.hpp"

namespace legmpc {

/// Point on the half-ellipse from `origin` to `target` with its apex `apex_height`
/// above the chord. `s` in [0, 1] is the geometric parameter (not time).
Vec3 half_ellipse_point(const Vec3& origin, const Vec3& target, double apex_height, double s);

struct SwingSample {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();      // d/dt
  Vec3 acceleration = Vec3::Zero();  // d2/dt2
};

/// Foot swing along a half-ellipse. Time enters through the phase in [0, 1]
/// and a cycloidal time law, so velocity and acceleration vanish at lift-off
/// and touchdown. Retargeting blends the position offset out smoothly over
/// the remaining swing, keeping position and velocity continuous at the switch.
class SwingTrajectory {
 public:
  SwingTrajectory() = default;
  SwingTrajectory(const Vec3& origin, const Vec3& target, double apex_height, double duration);

  /// Derivatives are with respect to time (phase rate = 1 / duration).
  SwingSample sample(double phase) const;

  void retarget(double phase, const Vec3& new_target);

  const Vec3& origin() const { return origin_; }
  const Vec3& target() const { return target_; }
  double duration() const { return duration_; }

 private:
  SwingSample nominal(double phase) const;

  Vec3 origin_ = Vec3::Zero();
  Vec3 target_ = Vec3::Zero();
  double apex_height_ = 0.1;
  double duration_ = 1.0;
  Vec3 offset_ = Vec3::Zero();
  Vec3 rate_offset_ = Vec3::Zero();  // d/dphase
  double blend_start_ = 0.0;
};

}  // namespace legmpc
