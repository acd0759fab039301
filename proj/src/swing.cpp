#include "legmpc/swing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace legmpc {

namespace {

constexpr double kPi = std::numbers::pi;

struct Scalar3 {
  double v, d, dd;
};

// Cycloidal time law s(phase) with s' = s'' = 0 at both ends.
Scalar3 time_law(double phase) {
  const double a = 2.0 * kPi * phase;
  return {phase - std::sin(a) / (2.0 * kPi), 1.0 - std::cos(a), 2.0 * kPi * std::sin(a)};
}

// Quintic smoothstep on u in [0, 1].
Scalar3 smoothstep(double u) {
  const double u2 = u * u, u3 = u2 * u;
  return {u3 * (10.0 - 15.0 * u + 6.0 * u2), 30.0 * u2 * (1.0 - u) * (1.0 - u),
          60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)};
}

}  // namespace

Vec3 half_ellipse_point(const Vec3& origin, const Vec3& target, double apex_height, double s) {
  const double chord = 0.5 * (1.0 - std::cos(kPi * s));
  return origin + (target - origin) * chord + Vec3(0.0, 0.0, apex_height * std::sin(kPi * s));
}

SwingTrajectory::SwingTrajectory(const Vec3& origin, const Vec3& target, double apex_height,
                                 double duration)
    : origin_(origin), target_(target), apex_height_(apex_height), duration_(duration) {
  if (!(duration > 0.0)) throw std::invalid_argument("swing duration must be positive");
}

SwingSample SwingTrajectory::nominal(double phase) const {
  const Scalar3 s = time_law(phase);
  const double c = 0.5 * (1.0 - std::cos(kPi * s.v));
  const double c_s = 0.5 * kPi * std::sin(kPi * s.v);
  const double c_ss = 0.5 * kPi * kPi * std::cos(kPi * s.v);
  const double b = std::sin(kPi * s.v);
  const double b_s = kPi * std::cos(kPi * s.v);
  const double b_ss = -kPi * kPi * std::sin(kPi * s.v);

  const Vec3 chord = target_ - origin_;
  const Vec3 up = Vec3::UnitZ() * apex_height_;
  const Vec3 d_ds = chord * c_s + up * b_s;
  const Vec3 d2_ds2 = chord * c_ss + up * b_ss;

  SwingSample out;
  out.position = origin_ + chord * c + up * b;
  out.velocity = d_ds * s.d;
  out.acceleration = d2_ds2 * s.d * s.d + d_ds * s.dd;
  return out;
}

SwingSample SwingTrajectory::sample(double phase) const {
  phase = std::clamp(phase, 0.0, 1.0);
  SwingSample out = nominal(phase);
  if (phase > blend_start_ && blend_start_ < 1.0) {
    // Position and phase-velocity offsets at the last retarget, faded out by touchdown.
    const double span = 1.0 - blend_start_;
    const double u = (phase - blend_start_) / span;
    const Scalar3 w = smoothstep(u);
    const Scalar3 g{u * std::pow(1.0 - u, 3), (1.0 - u) * (1.0 - u) * (1.0 - 4.0 * u),
                    (1.0 - u) * (12.0 * u - 6.0)};
    out.position += offset_ * (1.0 - w.v) + rate_offset_ * (span * g.v);
    out.velocity += -offset_ * (w.d / span) + rate_offset_ * g.d;
    out.acceleration += -offset_ * (w.dd / (span * span)) + rate_offset_ * (g.dd / span);
  } else if (phase <= blend_start_) {
    out.position += offset_;
    out.velocity += rate_offset_;
  }
  out.velocity /= duration_;
  out.acceleration /= duration_ * duration_;
  return out;
}

void SwingTrajectory::retarget(double phase, const Vec3& new_target) {
  phase = std::clamp(phase, 0.0, 1.0);
  if (phase >= 1.0) return;
  const SwingSample current = sample(phase);
  target_ = new_target;
  blend_start_ = phase;
  const SwingSample fresh = nominal(phase);
  offset_ = current.position - fresh.position;
  rate_offset_ = current.velocity * duration_ - fresh.velocity;
}

}  // namespace legmpc
