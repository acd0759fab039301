#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace legmpc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline constexpr int kNumLegs = 4;
inline constexpr int kStateDim = 15;
inline constexpr int kInputDim = 3 * kNumLegs;
inline constexpr double kGravity = 9.81;

/// Leg order used everywhere: left-front, right-front, left-hind, right-hind.
enum class Leg : int { LF = 0, RF = 1, LH = 2, RH = 3 };

inline const char* leg_name(int leg) {
  static constexpr std::array<const char*, kNumLegs> names{"LF", "RF", "LH", "RH"};
  return names.at(static_cast<std::size_t>(leg));
}

using LegFlags = std::array<bool, kNumLegs>;
using FootPositions = std::array<Vec3, kNumLegs>;

/// Spatial force on the trunk, world frame: torque on top of force.
using Wrench = Vec6;

inline Vec3 torque_part(const Wrench& w) { return w.head<3>(); }
inline Vec3 force_part(const Wrench& w) { return w.tail<3>(); }

inline Vec3 gravity_vector() { return Vec3(0.0, 0.0, -kGravity); }

/// Raised for |pitch| too close to pi/2, where the Euler-rate map is singular.
class SingularOrientation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace legmpc
