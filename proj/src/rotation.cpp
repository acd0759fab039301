#include "legmpc/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace legmpc {

namespace {

void check_pitch(double pitch) {
  if (!(std::abs(pitch) < std::numbers::pi / 2.0 - kSingularityMargin)) {
    throw SingularOrientation("pitch " + std::to_string(pitch) +
                              " rad is at the Euler-rate singularity");
  }
}

}  // namespace

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Vec3 unskew(const Mat3& m) {
  return 0.5 * Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

Mat3 rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return m;
}

Mat3 rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, 0, s,
       0, 1, 0,
       -s, 0, c;
  return m;
}

Mat3 rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return m;
}

Mat3 rotation_from_euler(const EulerZYX& e) {
  return rot_z(e.yaw) * rot_y(e.pitch) * rot_x(e.roll);
}

EulerZYX euler_from_rotation(const Mat3& r) {
  EulerZYX e;
  e.pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  e.roll = std::atan2(r(2, 1), r(2, 2));
  e.yaw = std::atan2(r(1, 0), r(0, 0));
  return e;
}

Mat3 exp_so3(const Vec3& w) {
  const double angle = w.norm();
  const Mat3 k = skew(w);
  if (angle < 1e-8) {
    // second-order series is exact to machine precision here
    return Mat3::Identity() + k + 0.5 * k * k;
  }
  const double a = std::sin(angle) / angle;
  const double b = (1.0 - std::cos(angle)) / (angle * angle);
  return Mat3::Identity() + a * k + b * k * k;
}

Mat3 euler_rate_map(const EulerZYX& e) {
  check_pitch(e.pitch);
  const double cp = std::cos(e.pitch), sp = std::sin(e.pitch);
  const double cy = std::cos(e.yaw), sy = std::sin(e.yaw);
  Mat3 t;
  t << cp * cy, -sy, 0.0,
       cp * sy, cy, 0.0,
       -sp, 0.0, 1.0;
  return t;
}

Mat3 euler_rate_map_inverse(const EulerZYX& e) {
  check_pitch(e.pitch);
  const double cp = std::cos(e.pitch), tp = std::tan(e.pitch);
  const double cy = std::cos(e.yaw), sy = std::sin(e.yaw);
  Mat3 t;
  t << cy / cp, sy / cp, 0.0,
       -sy, cy, 0.0,
       cy * tp, sy * tp, 1.0;
  return t;
}

}  // namespace legmpc
