#pragma once

#include "legmpc/foothold.hpp"
#include "legmpc/gait.hpp"
#include "legmpc/model.hpp"
#include "legmpc/mpc.hpp"
#include "legmpc/reference.hpp"
#include "legmpc/terrain.hpp"

namespace legmpc {

struct PlannerConfig {
  GaitParams gait = GaitParams::trot();
  FootholdConfig foothold;
  ReferenceConfig reference;
  MpcConfig mpc;
  RobotParams robot;
  NominalStance nominal_stance{Vec2(0.44, 0.29), Vec2(0.44, -0.29), Vec2(-0.44, 0.29),
                               Vec2(-0.44, -0.29)};
};

struct PlannerInput {
  RobotState state;  // feet: stance positions, lift-off points for swing legs
  double gait_phase = 0.0;
  std::array<double, kNumLegs> swing_elapsed{};
  UserCommand command;
};

/// Everything computed for one MPC solve.
struct HorizonPlan {
  ContactSchedule schedule;
  ContactSequence contacts;
  ReferenceTrajectory reference;
  std::vector<LegFlags> stance;       // per step
  std::vector<FootPositions> feet;    // per step
  DiscreteLtv ltv;
  CondensedHorizon horizon;
  MpcWeights weights;
  QpProblem qp;
  GrfPlan plan;
};

/// Stance flags and foot positions in effect at t = k * period, k = 0..n-1.
void step_contacts(const ContactSchedule& schedule, const ContactSequence& contacts, int n,
                   double period, std::vector<LegFlags>& stance, std::vector<FootPositions>& feet);

/// Linearized, discretized model for every step of the horizon.
DiscreteLtv build_ltv(const ReferenceTrajectory& reference, const std::vector<FootPositions>& feet,
                      const RobotParams& params);

/// Schedule, contacts, references, model and QP for the current state; solves
/// the MPC when `solve` is set. Throws NoSafeFoothold, TerrainError or MpcFailure.
HorizonPlan plan_horizon(const PlannerInput& input, const HeightMap& map,
                         const PlannerConfig& config, bool solve = true);

}  // namespace legmpc
