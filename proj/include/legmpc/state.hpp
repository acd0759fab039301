#pragma once

#include "legmpc/rotation.hpp"
#include "legmpc/types.hpp"

namespace legmpc {

using StateVec = Eigen::Matrix<double, kStateDim, 1>;

/// Offsets of the blocks of the 15-dimensional MPC state.
namespace sx {
inline constexpr int kAngles = 0;
inline constexpr int kPosition = 3;
inline constexpr int kOmega = 6;
inline constexpr int kVelocity = 9;
inline constexpr int kGravity = 12;
}  // namespace sx

/// Trunk state. Angular velocity is expressed in the world frame.
struct RobotState {
  EulerZYX angles;
  Vec3 position = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  FootPositions feet{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};

  StateVec to_vector() const {
    StateVec x;
    x << angles.vec(), position, omega, velocity, gravity_vector();
    return x;
  }
};

}  // namespace legmpc
