#pragma once

#include "legmpc/types.hpp"

namespace legmpc {

/// Euler angles (roll, pitch, yaw), composed as R = Rz(yaw) * Ry(pitch) * Rx(roll).
struct EulerZYX {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  Vec3 vec() const { return {roll, pitch, yaw}; }
  static EulerZYX from_vec(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
};

inline constexpr double kSingularityMargin = 1e-6;

Mat3 skew(const Vec3& v);
Vec3 unskew(const Mat3& m);

Mat3 rot_x(double angle);
Mat3 rot_y(double angle);
Mat3 rot_z(double angle);

Mat3 rotation_from_euler(const EulerZYX& e);

/// Inverse of rotation_from_euler. Pitch is returned in [-pi/2, pi/2].
EulerZYX euler_from_rotation(const Mat3& r);

/// Exponential map so(3) -> SO(3) (Rodrigues).
Mat3 exp_so3(const Vec3& rotation_vector);

/// T(angles) such that omega_world = T * d/dt(roll, pitch, yaw).
/// Throws SingularOrientation when |pitch| >= pi/2 - kSingularityMargin.
Mat3 euler_rate_map(const EulerZYX& e);

/// Closed-form inverse of euler_rate_map; same singularity rule.
Mat3 euler_rate_map_inverse(const EulerZYX& e);

}  // namespace legmpc
