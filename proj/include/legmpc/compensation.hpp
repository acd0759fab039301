#pragma once

#include "legmpc/types.hpp"

namespace legmpc {

using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat6x12 = Eigen::Matrix<double, 6, 12>;

/// Three-joint legs (HAA about base x, HFE and KFE about the rotated y axis)
/// with one point mass per link. Masses and lengths are placeholders for a
/// ~130 kg quadruped, not values of a real robot.
struct LegModel {
  std::array<Vec3, kNumLegs> hips{Vec3(0.44, 0.21, 0.0), Vec3(0.44, -0.21, 0.0),
                                  Vec3(-0.44, 0.21, 0.0), Vec3(-0.44, -0.21, 0.0)};
  double lateral_offset = 0.08;  // HAA to HFE, outward
  double thigh = 0.40;
  double shank = 0.42;
  std::array<double, 3> mass{2.0, 4.0, 1.5};          // hip link, thigh, shank
  std::array<double, 3> com_fraction{0.5, 0.4, 0.5};  // along each link

  /// +1 for left legs, -1 for right legs.
  static double side(int leg) { return (leg % 2 == 0) ? 1.0 : -1.0; }
  /// Foot position at zero joint angles projected to the hip height, base frame.
  Vec2 nominal_foot(int leg) const;
};

/// Joint origins, axes and link mass points of one leg in the base frame.
struct LegFrames {
  std::array<Vec3, 3> origin;
  std::array<Vec3, 3> axis;
  std::array<Vec3, 3> mass_point;
  Vec3 foot = Vec3::Zero();
};

LegFrames leg_frames(const LegModel& model, int leg, const Vec3& q);
Vec3 foot_position(const LegModel& model, int leg, const Vec3& q);
Mat3 foot_jacobian(const LegModel& model, int leg, const Vec3& q);

/// Analytic inverse kinematics (knee angle negative). Targets out of reach
/// are pulled onto the workspace boundary and `reachable` is cleared.
Vec3 leg_ik(const LegModel& model, int leg, const Vec3& foot_base, bool* reachable = nullptr);

/// Link mass points in the world frame for all legs.
std::array<std::array<Vec3, 3>, kNumLegs> mass_points_world(const LegModel& model,
                                                             const Vec3& base_pos,
                                                             const Mat3& base_rot, const Vec12& q);

/// Cross inertia M_ua: column j is the wrench about base_pos needed per unit
/// joint acceleration q_j with the base held fixed (world frame).
Mat6x12 cross_inertia(const LegModel& model, const Vec3& base_pos, const Mat3& base_rot,
                      const Vec12& q);

inline Wrench compensation_wrench(const Mat6x12& m_ua, const Vec12& qdd) { return m_ua * qdd; }

struct ForceBounds {
  double mu = 0.7;
  double f_min = 0.0;
  double f_max = 1e9;
};

struct Distribution {
  std::array<Vec3, kNumLegs> forces{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  double residual = 0.0;  // ||G F - w||
  bool clamped = false;
  bool feasible = true;  // residual within tolerance
};

/// Forces closest to `base` (per stance foot) that reproduce the wrench w
/// about `com`: F = F_base + pinv(G)(w - G F_base). Violations of the bounds
/// or the friction pyramid are clamped once and the remaining feet re-solved.
Distribution distribute_wrench(const Wrench& w, const FootPositions& feet, const LegFlags& stance,
                               const Vec3& com, const ForceBounds& bounds,
                               const std::array<Vec3, kNumLegs>& base = {Vec3::Zero(), Vec3::Zero(),
                                                                         Vec3::Zero(), Vec3::Zero()},
                               double tolerance = 1e-6);

}  // namespace legmpc
