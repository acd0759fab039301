#include "legmpc/planner.hpp"

namespace legmpc {

void step_contacts(const ContactSchedule& schedule, const ContactSequence& contacts, int n,
                   double period, std::vector<LegFlags>& stance, std::vector<FootPositions>& feet) {
  stance.assign(static_cast<std::size_t>(n), LegFlags{});
  feet.assign(static_cast<std::size_t>(n), FootPositions{});
  std::size_t current = 0;
  for (int k = 0; k < n; ++k) {
    const double t = k * period;
    while (current + 1 < schedule.events.size() &&
           schedule.events[current + 1].dt <= t + kEventTieTolerance) {
      ++current;
    }
    stance[static_cast<std::size_t>(k)] = schedule.events[current].flags;
    feet[static_cast<std::size_t>(k)] = contacts.feet_at(static_cast<int>(current));
  }
}

DiscreteLtv build_ltv(const ReferenceTrajectory& reference, const std::vector<FootPositions>& feet,
                      const RobotParams& params) {
  DiscreteLtv ltv;
  ltv.period = reference.period;
  const int n = static_cast<int>(feet.size());
  for (int k = 0; k < n; ++k) {
    const ContinuousModel c = continuous_matrices(reference.angles_at(k), reference.position_at(k),
                                                  feet[static_cast<std::size_t>(k)], params);
    Discretized d = discretize_zoh(c.a, c.b, reference.period);
    ltv.a.push_back(std::move(d.a));
    ltv.b.push_back(std::move(d.b));
  }
  return ltv;
}

HorizonPlan plan_horizon(const PlannerInput& input, const HeightMap& map,
                         const PlannerConfig& config, bool solve) {
  HorizonPlan h;
  const int n = config.mpc.horizon;
  h.schedule = build_schedule(config.gait, input.gait_phase, input.swing_elapsed);

  ContactSequenceInput cs;
  cs.base = {input.state.position, input.state.velocity, input.state.angles.yaw};
  cs.current_feet = input.state.feet;
  cs.commanded_velocity = input.command.velocity;
  cs.nominal_stance = config.nominal_stance;
  h.contacts = build_contact_sequence(cs, h.schedule, map, config.gait, config.foothold);

  std::vector<ReferenceAnchor> anchors =
      anchor_references(input.state, input.command, h.schedule, h.contacts, config.reference);
  rates_from_anchors(anchors);
  const double period = h.schedule.span / n;
  h.reference = resample_zoh(anchors, n, period, h.schedule.span);

  step_contacts(h.schedule, h.contacts, n, period, h.stance, h.feet);
  h.ltv = build_ltv(h.reference, h.feet, config.robot);
  h.horizon = condense(h.ltv, input.state.to_vector());
  h.horizon.x_ref.resize(kStateDim * n);
  for (int k = 0; k < n; ++k) {
    h.horizon.x_ref.segment<kStateDim>(kStateDim * k) = h.reference.samples[static_cast<std::size_t>(k) + 1];
  }
  h.weights = MpcWeights::uniform(n, config.mpc.state_weight, config.mpc.input_weight);
  h.qp = build_qp(h.horizon, h.weights, h.stance, config.robot);
  if (solve) h.plan = solve_mpc(h.qp, h.horizon, h.weights, h.stance, config.mpc.qp);
  return h;
}

}  // namespace legmpc
