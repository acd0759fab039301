#include "legmpc/compensation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "legmpc/rotation.hpp"

namespace legmpc {

namespace {

double wrap_angle(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

using Mat6X = Eigen::Matrix<double, 6, Eigen::Dynamic>;

Mat6X grasp_map(const FootPositions& feet, const std::vector<int>& legs, const Vec3& com) {
  Mat6X g(6, 3 * static_cast<int>(legs.size()));
  for (std::size_t k = 0; k < legs.size(); ++k) {
    g.block<3, 3>(0, 3 * static_cast<int>(k)) = skew(feet[legs[k]] - com);
    g.block<3, 3>(3, 3 * static_cast<int>(k)).setIdentity();
  }
  return g;
}

// Least-norm correction of the free feet so that G F matches w.
void resolve(const Wrench& w, const FootPositions& feet, const std::vector<int>& free_legs,
             const Vec3& com, std::array<Vec3, kNumLegs>& forces) {
  if (free_legs.empty()) return;
  const Mat6X g = grasp_map(feet, free_legs, com);
  VecX f(3 * free_legs.size());
  for (std::size_t k = 0; k < free_legs.size(); ++k) f.segment<3>(3 * static_cast<int>(k)) = forces[free_legs[k]];
  Wrench have = Wrench::Zero();
  for (int i = 0; i < kNumLegs; ++i) {
    have.head<3>() += (feet[i] - com).cross(forces[i]);
    have.tail<3>() += forces[i];
  }
  const Eigen::CompleteOrthogonalDecomposition<MatX> cod(g);
  f += cod.solve(VecX(w - have));
  for (std::size_t k = 0; k < free_legs.size(); ++k) forces[free_legs[k]] = f.segment<3>(3 * static_cast<int>(k));
}

}  // namespace

Vec2 LegModel::nominal_foot(int leg) const {
  const Vec3& h = hips[static_cast<std::size_t>(leg)];
  return {h.x(), h.y() + side(leg) * lateral_offset};
}

LegFrames leg_frames(const LegModel& model, int leg, const Vec3& q) {
  const double s = LegModel::side(leg);
  const Mat3 r0 = rot_x(q[0]);
  const Mat3 r1 = r0 * rot_y(q[1]);
  const Mat3 r2 = r1 * rot_y(q[2]);
  const Vec3 lateral = r0 * Vec3(0.0, s * model.lateral_offset, 0.0);
  const Vec3 thigh = r1 * Vec3(0.0, 0.0, -model.thigh);
  const Vec3 shank = r2 * Vec3(0.0, 0.0, -model.shank);

  LegFrames f;
  f.origin[0] = model.hips[static_cast<std::size_t>(leg)];
  f.origin[1] = f.origin[0] + lateral;
  f.origin[2] = f.origin[1] + thigh;
  f.axis[0] = Vec3::UnitX();
  f.axis[1] = r0.col(1);
  f.axis[2] = r0.col(1);
  f.mass_point[0] = f.origin[0] + model.com_fraction[0] * lateral;
  f.mass_point[1] = f.origin[1] + model.com_fraction[1] * thigh;
  f.mass_point[2] = f.origin[2] + model.com_fraction[2] * shank;
  f.foot = f.origin[2] + shank;
  return f;
}

Vec3 foot_position(const LegModel& model, int leg, const Vec3& q) {
  return leg_frames(model, leg, q).foot;
}

Mat3 foot_jacobian(const LegModel& model, int leg, const Vec3& q) {
  const LegFrames f = leg_frames(model, leg, q);
  Mat3 j;
  for (int k = 0; k < 3; ++k) j.col(k) = f.axis[k].cross(f.foot - f.origin[k]);
  return j;
}

Vec3 leg_ik(const LegModel& model, int leg, const Vec3& foot_base, bool* reachable) {
  bool ok = true;
  const double s = LegModel::side(leg);
  const Vec3 d = foot_base - model.hips[static_cast<std::size_t>(leg)];

  // HAA: the foot must lie in the plane offset laterally by the hip link.
  double rho = std::hypot(d.y(), d.z());
  const double l0 = model.lateral_offset;
  if (rho < l0) {
    ok = false;
    rho = l0;
  }
  const double beta = std::atan2(d.z(), d.y());
  const double gamma = std::acos(std::clamp(s * l0 / rho, -1.0, 1.0));
  const double c1 = wrap_angle(beta + gamma), c2 = wrap_angle(beta - gamma);
  const double q0 = std::abs(c1) <= std::abs(c2) ? c1 : c2;

  const double x = d.x();
  const double z = -std::sin(q0) * d.y() + std::cos(q0) * d.z();
  const double l1 = model.thigh, l2 = model.shank;
  double dist = std::hypot(x, z);
  const double reach_max = l1 + l2 - 1e-9, reach_min = std::abs(l1 - l2) + 1e-9;
  if (dist > reach_max || dist < reach_min) {
    ok = false;
    dist = std::clamp(dist, reach_min, reach_max);
  }
  const double cos_knee = (dist * dist - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  const double q2 = -std::acos(std::clamp(cos_knee, -1.0, 1.0));
  const double phi = std::atan2(-x, -z);
  const double q1 = phi - std::atan2(l2 * std::sin(q2), l1 + l2 * std::cos(q2));
  if (reachable) *reachable = ok;
  return {q0, q1, q2};
}

std::array<std::array<Vec3, 3>, kNumLegs> mass_points_world(const LegModel& model,
                                                             const Vec3& base_pos,
                                                             const Mat3& base_rot, const Vec12& q) {
  std::array<std::array<Vec3, 3>, kNumLegs> out;
  for (int i = 0; i < kNumLegs; ++i) {
    const LegFrames f = leg_frames(model, i, q.segment<3>(3 * i));
    for (int k = 0; k < 3; ++k) out[i][k] = base_pos + base_rot * f.mass_point[k];
  }
  return out;
}

Mat6x12 cross_inertia(const LegModel& model, const Vec3& base_pos, const Mat3& base_rot,
                      const Vec12& q) {
  Mat6x12 m = Mat6x12::Zero();
  for (int i = 0; i < kNumLegs; ++i) {
    const LegFrames f = leg_frames(model, i, q.segment<3>(3 * i));
    for (int j = 0; j < 3; ++j) {
      const Vec3 axis = base_rot * f.axis[j];
      const Vec3 origin = base_pos + base_rot * f.origin[j];
      for (int k = j; k < 3; ++k) {  // links distal to joint j
        const Vec3 c = base_pos + base_rot * f.mass_point[k];
        const Vec3 dc = axis.cross(c - origin);
        m.block<3, 1>(0, 3 * i + j) += model.mass[k] * (c - base_pos).cross(dc);
        m.block<3, 1>(3, 3 * i + j) += model.mass[k] * dc;
      }
    }
  }
  return m;
}

Distribution distribute_wrench(const Wrench& w, const FootPositions& feet, const LegFlags& stance,
                               const Vec3& com, const ForceBounds& bounds,
                               const std::array<Vec3, kNumLegs>& base, double tolerance) {
  Distribution out;
  std::vector<int> legs;
  for (int i = 0; i < kNumLegs; ++i) {
    if (stance[i]) {
      legs.push_back(i);
      out.forces[i] = base[i];
    }
  }
  resolve(w, feet, legs, com, out.forces);

  std::vector<int> free_legs;
  for (int i : legs) {
    Vec3 f = out.forces[i];
    const Vec3 before = f;
    f.z() = std::clamp(f.z(), bounds.f_min, bounds.f_max);
    const double tangential = std::max(0.0, bounds.mu * f.z());
    f.x() = std::clamp(f.x(), -tangential, tangential);
    f.y() = std::clamp(f.y(), -tangential, tangential);
    if (f != before) {
      out.clamped = true;
      out.forces[i] = f;
    } else {
      free_legs.push_back(i);
    }
  }
  if (out.clamped) resolve(w, feet, free_legs, com, out.forces);

  Wrench have = Wrench::Zero();
  for (int i : legs) {
    have.head<3>() += (feet[i] - com).cross(out.forces[i]);
    have.tail<3>() += out.forces[i];
  }
  out.residual = (have - w).norm();
  out.feasible = out.residual <= tolerance * std::max(1.0, w.norm());
  return out;
}

}  // namespace legmpc
