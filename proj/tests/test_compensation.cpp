#include <gtest/gtest.h>

#include <random>

#include "legmpc/compensation.hpp"
#include "legmpc/rotation.hpp"

using namespace legmpc;

namespace {

constexpr LegFlags kAll{true, true, true, true};

// Angular (about r) and linear momentum of all leg masses along q(t) = q0 + t^2/2 qdd,
// with link velocities from a central difference in t.
Wrench leg_momentum(const LegModel& m, const Vec3& r, const Mat3& rot, const Vec12& q0,
                    const Vec12& qdd, double t) {
  const auto path = [&](double s) { return mass_points_world(m, r, rot, q0 + 0.5 * s * s * qdd); };
  const double d = 1e-5;
  const auto c = path(t), cp = path(t + d), cm = path(t - d);
  Wrench h = Wrench::Zero();
  for (int i = 0; i < kNumLegs; ++i) {
    for (int k = 0; k < 3; ++k) {
      const Vec3 v = (cp[i][k] - cm[i][k]) / (2 * d);
      h.head<3>() += m.mass[k] * (c[i][k] - r).cross(v);
      h.tail<3>() += m.mass[k] * v;
    }
  }
  return h;
}

Vec12 random_q(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> haa(-0.3, 0.3), hfe(-0.8, 0.8), kfe(-2.2, -0.3);
  Vec12 q;
  for (int i = 0; i < kNumLegs; ++i) q.segment<3>(3 * i) = Vec3(haa(rng), hfe(rng), kfe(rng));
  return q;
}

FootPositions square_feet() {
  return {Vec3(0.44, 0.29, 0.0), Vec3(0.44, -0.29, 0.0), Vec3(-0.44, 0.29, 0.0),
          Vec3(-0.44, -0.29, 0.0)};
}

}  // namespace

TEST(Compensation, CrossInertiaMatchesMomentumRate) {
  const LegModel model;
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec12 q = random_q(rng);
    const Vec3 r(u(rng), u(rng), 0.5 + 0.1 * u(rng));
    const Mat3 rot = exp_so3(0.3 * Vec3(u(rng), u(rng), u(rng)));
    const Mat6x12 m = cross_inertia(model, r, rot, q);
    for (int j = 0; j < 12; ++j) {
      const Vec12 qdd = Vec12::Unit(j);
      double prev = 0.0;
      for (int level = 0; level < 4; ++level) {
        const double h = 1e-2 / (1 << level);
        const Wrench fd = (leg_momentum(model, r, rot, q, qdd, h) -
                           leg_momentum(model, r, rot, q, qdd, -h)) / (2 * h);
        const double err = (fd - m.col(j)).norm();
        if (level > 0) EXPECT_LT(err, 0.6 * prev + 1e-8) << "joint " << j;
        prev = err;
      }
      EXPECT_LT(prev, 1e-4 * std::max(1.0, m.col(j).norm()));
    }
  }
}

TEST(Compensation, SingleMassArm) {
  LegModel model;
  model.mass = {2.0, 0.0, 0.0};
  model.com_fraction = {1.0, 0.4, 0.5};
  model.lateral_offset = 0.3;
  const Mat6x12 m = cross_inertia(model, Vec3::Zero(), Mat3::Identity(), Vec12::Zero());
  // LF hip link points along +y; rotating about x moves the mass along +z.
  const Vec3 c = model.hips[0] + Vec3(0.0, 0.3, 0.0);
  const Vec3 force = 2.0 * Vec3(0.0, 0.0, 0.3);
  EXPECT_NEAR((m.block<3, 1>(3, 0) - force).norm(), 0.0, 1e-15);
  EXPECT_NEAR((m.block<3, 1>(0, 0) - c.cross(force)).norm(), 0.0, 1e-15);
  // Distal joints carry no mass.
  EXPECT_EQ(m.col(1).norm(), 0.0);
  EXPECT_EQ(m.col(2).norm(), 0.0);
}

TEST(Compensation, ZeroMassesAndZeroAccelerations) {
  LegModel model;
  model.mass = {0.0, 0.0, 0.0};
  std::mt19937_64 rng(1);
  EXPECT_EQ(cross_inertia(model, Vec3(1, 2, 3), Mat3::Identity(), random_q(rng)).norm(), 0.0);
  const Mat6x12 m = cross_inertia(LegModel{}, Vec3::Zero(), Mat3::Identity(), random_q(rng));
  EXPECT_EQ(compensation_wrench(m, Vec12::Zero()), Wrench::Zero());
  const Vec12 a = Vec12::LinSpaced(-1.0, 1.0), b = Vec12::Constant(0.3);
  EXPECT_NEAR((compensation_wrench(m, a + b) - compensation_wrench(m, a) - compensation_wrench(m, b))
                  .cwiseAbs().maxCoeff(), 0.0, 1e-12);
  EXPECT_EQ(compensation_wrench(m, Vec12::Unit(4)), Wrench(m.col(4)));
}

TEST(Compensation, InverseKinematicsRoundTrip) {
  const LegModel model;
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec12 q = random_q(rng);
    for (int leg = 0; leg < kNumLegs; ++leg) {
      const Vec3 qi = q.segment<3>(3 * leg);
      const Vec3 foot = foot_position(model, leg, qi);
      // Feet level with the hip have a second HAA solution; IK picks the one below.
      if (foot.z() - model.hips[leg].z() > -0.2) continue;
      bool ok = false;
      const Vec3 back = leg_ik(model, leg, foot, &ok);
      EXPECT_TRUE(ok);
      EXPECT_NEAR((back - qi).norm(), 0.0, 1e-9);
    }
  }
  bool ok = true;
  leg_ik(model, 0, model.hips[0] + Vec3(0.0, 0.08, -2.0), &ok);
  EXPECT_FALSE(ok);
}

TEST(Compensation, FootJacobianMatchesFiniteDifference) {
  const LegModel model;
  std::mt19937_64 rng(12);
  const Vec12 q = random_q(rng);
  for (int leg = 0; leg < kNumLegs; ++leg) {
    const Vec3 qi = q.segment<3>(3 * leg);
    const Mat3 j = foot_jacobian(model, leg, qi);
    for (int k = 0; k < 3; ++k) {
      const double h = 1e-6;
      const Vec3 fd = (foot_position(model, leg, qi + h * Vec3::Unit(k)) -
                       foot_position(model, leg, qi - h * Vec3::Unit(k))) / (2 * h);
      EXPECT_NEAR((fd - j.col(k)).norm(), 0.0, 1e-8);
    }
  }
}

TEST(Compensation, DistributeSymmetricStand) {
  const double mg = 130.0 * kGravity;
  const Wrench w = (Wrench() << 0, 0, 0, 0, 0, mg).finished();
  const Distribution d = distribute_wrench(w, square_feet(), kAll, Vec3(0, 0, 0.58), {});
  for (const Vec3& f : d.forces) EXPECT_NEAR((f - Vec3(0, 0, mg / 4)).norm(), 0.0, 1e-9);
  EXPECT_FALSE(d.clamped);
  EXPECT_LE(d.residual, 1e-8);
}

TEST(Compensation, DistributeDiagonalPair) {
  const double mg = 130.0 * kGravity;
  const Wrench w = (Wrench() << 0, 0, 0, 0, 0, mg).finished();
  const Distribution d =
      distribute_wrench(w, square_feet(), {true, false, false, true}, Vec3(0, 0, 0.58), {});
  EXPECT_NEAR((d.forces[0] - Vec3(0, 0, mg / 2)).norm(), 0.0, 1e-9);
  EXPECT_NEAR((d.forces[3] - Vec3(0, 0, mg / 2)).norm(), 0.0, 1e-9);
  EXPECT_EQ(d.forces[1], Vec3::Zero());
  EXPECT_EQ(d.forces[2], Vec3::Zero());
  EXPECT_TRUE(d.feasible);
}

TEST(Compensation, DistributeZeroAndResidual) {
  const Distribution zero = distribute_wrench(Wrench::Zero(), square_feet(), kAll, Vec3(0, 0, 0.5), {});
  for (const Vec3& f : zero.forces) EXPECT_NEAR(f.norm(), 0.0, 1e-12);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    Wrench w;
    w << 20 * u(rng), 20 * u(rng), 20 * u(rng), 50 * u(rng), 50 * u(rng), 1200 + 100 * u(rng);
    const Vec3 com(0.05 * u(rng), 0.05 * u(rng), 0.55);
    const Distribution d = distribute_wrench(w, square_feet(), kAll, com, {});
    Wrench have = Wrench::Zero();
    for (int k = 0; k < kNumLegs; ++k) {
      have.head<3>() += (square_feet()[k] - com).cross(d.forces[k]);
      have.tail<3>() += d.forces[k];
    }
    EXPECT_NEAR((have - w).norm(), d.residual, 1e-9);
    if (!d.clamped) EXPECT_LE(d.residual, 1e-8);
  }
}

TEST(Compensation, DistributeClampsAndReportsInfeasible) {
  // Pulling the trunk down cannot be done with unilateral contacts.
  const Wrench w = (Wrench() << 0, 0, 0, 0, 0, -100).finished();
  const Distribution d = distribute_wrench(w, square_feet(), kAll, Vec3(0, 0, 0.58), {});
  EXPECT_TRUE(d.clamped);
  EXPECT_FALSE(d.feasible);
  EXPECT_GT(d.residual, 1.0);
  for (const Vec3& f : d.forces) EXPECT_GE(f.z(), 0.0);
}

TEST(Compensation, DistributeKeepsBaseForcesWhenConsistent) {
  const double mg = 130.0 * kGravity;
  std::array<Vec3, kNumLegs> base{Vec3(5, 0, mg / 4), Vec3(5, 0, mg / 4), Vec3(-5, 0, mg / 4),
                                  Vec3(-5, 0, mg / 4)};
  const Wrench w = (Wrench() << 0, 0, 0, 0, 0, mg).finished();
  const Distribution d = distribute_wrench(w, square_feet(), kAll, Vec3(0, 0, 0.58), {}, base);
  for (int i = 0; i < kNumLegs; ++i) EXPECT_NEAR((d.forces[i] - base[i]).norm(), 0.0, 1e-9);
}
