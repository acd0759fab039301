#include "legmpc/sim.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <random>

#include <spdlog/spdlog.h>

#include "legmpc/rotation.hpp"

namespace legmpc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kStraightKnee = 0.05;  // rad, knee closer to straight is treated as singular

class WorkspaceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LegMotion {
  Vec3 q = Vec3::Zero();
  Vec3 qd = Vec3::Zero();
  Vec3 qdd = Vec3::Zero();
};

// Joint motion that realizes a world-frame foot trajectory relative to the trunk.
// Base acceleration is not fed back into the joint accelerations.
LegMotion leg_motion(const LegModel& model, int leg, const TrunkState& trunk, const Vec3& p_w,
                     const Vec3& v_w, const Vec3& a_w) {
  const Mat3 rt = trunk.rotation.transpose();
  const Vec3 rel = p_w - trunk.position;
  const Vec3 p_b = rt * rel;
  const Vec3 v_b = rt * (v_w - trunk.velocity - trunk.omega.cross(rel));
  const Vec3 a_b = rt * a_w;

  LegMotion m;
  bool reachable = true;
  m.q = leg_ik(model, leg, p_b, &reachable);
  if (!reachable || std::abs(m.q[2]) < kStraightKnee) {
    throw WorkspaceLimit(std::string("leg ") + leg_name(leg) + " left its workspace");
  }
  const Eigen::PartialPivLU<Mat3> lu(foot_jacobian(model, leg, m.q));
  m.qd = lu.solve(v_b);
  constexpr double eps = 1e-6;
  const Mat3 j_dot = (foot_jacobian(model, leg, m.q + eps * m.qd) -
                      foot_jacobian(model, leg, m.q - eps * m.qd)) /
                     (2.0 * eps);
  m.qdd = lu.solve(a_b - j_dot * m.qd);
  return m;
}

// Wrench the moving legs exert on a fixed trunk: minus the rate of change of
// their momentum, including velocity-product terms.
Wrench leg_reaction(const LegModel& model, const TrunkState& trunk,
                    const std::array<LegMotion, kNumLegs>& legs) {
  constexpr double tau = 1e-3;
  Wrench w = Wrench::Zero();
  for (int i = 0; i < kNumLegs; ++i) {
    const LegMotion& m = legs[i];
    const auto at = [&](double t) { return leg_frames(model, i, m.q + m.qd * t + 0.5 * m.qdd * t * t); };
    const LegFrames f0 = at(0.0), fp = at(tau), fm = at(-tau);
    for (int k = 0; k < 3; ++k) {
      const Vec3 a = trunk.rotation * (fp.mass_point[k] - 2.0 * f0.mass_point[k] + fm.mass_point[k]) /
                     (tau * tau);
      const Vec3 arm = trunk.rotation * f0.mass_point[k];
      w.head<3>() -= model.mass[k] * arm.cross(a);
      w.tail<3>() -= model.mass[k] * a;
    }
  }
  return w;
}

struct LegRuntime {
  bool stance = true;
  Vec3 foot = Vec3::Zero();  // stance position, or lift-off point while swinging
  SwingTrajectory swing;
  double t_liftoff = 0.0;
  Vec3 predicted = Vec3::Zero();
  double last_error = kNaN;
};

double swing_phase(const GaitParams& gait, int leg, double gait_phase) {
  const double p = gait.leg_phase(leg, gait_phase);
  return std::clamp((p - gait.duty_factor) / (1.0 - gait.duty_factor), 0.0, 1.0);
}

Wrench disturbance_at(const std::vector<Disturbance>& list, double t) {
  Wrench w = Wrench::Zero();
  for (const Disturbance& d : list) {
    if (t >= d.start - 1e-12 && t < d.start + d.duration - 1e-12) {
      w.head<3>() += d.torque;
      w.tail<3>() += d.force;
    }
  }
  return w;
}

// PD trunk controller with a one-step QP distributing the desired wrench.
std::array<Vec3, kNumLegs> qp_ablation_forces(const SimConfig& cfg, const TrunkState& trunk,
                                              const FootPositions& feet, const LegFlags& stance,
                                              const UserCommand& cmd, const StateVec& ref,
                                              Wrench& desired) {
  const RobotParams& p = cfg.planner.robot;
  const QpAblationGains& g = cfg.qp_gains;
  const Vec3 v_ref = rot_z(trunk.angles.yaw) * Vec3(cmd.velocity.x(), cmd.velocity.y(), 0.0);

  Vec3 acc;
  acc.head<2>() = g.velocity_xy * (v_ref.head<2>() - trunk.velocity.head<2>());
  acc.z() = g.height_p * (ref[sx::kPosition + 2] - trunk.position.z()) - g.height_d * trunk.velocity.z();
  Vec3 ang_err = ref.segment<3>(sx::kAngles) - trunk.angles.vec();
  ang_err.z() = 0.0;  // heading is rate-controlled only
  const Vec3 omega_ref(0.0, 0.0, cmd.yaw_rate);
  const Vec3 alpha =
      euler_rate_map(trunk.angles) * (g.angle_p * ang_err) + g.angle_d * (omega_ref - trunk.omega);
  const Mat3 inertia_w = trunk.rotation * p.inertia * trunk.rotation.transpose();
  desired.head<3>() = inertia_w * alpha;
  desired.tail<3>() = p.mass * (acc - gravity_vector());

  std::vector<int> legs;
  for (int i = 0; i < kNumLegs; ++i) {
    if (stance[i]) legs.push_back(i);
  }
  std::array<Vec3, kNumLegs> forces{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  if (legs.empty()) return forces;
  const int d = 3 * static_cast<int>(legs.size());
  MatX grasp(6, d);
  for (std::size_t k = 0; k < legs.size(); ++k) {
    grasp.block<3, 3>(0, 3 * static_cast<int>(k)) = skew(feet[legs[k]] - trunk.position);
    grasp.block<3, 3>(3, 3 * static_cast<int>(k)).setIdentity();
  }
  Vec6 wrench_weight;
  wrench_weight << Vec3::Constant(g.torque_weight), Vec3::Ones();
  const MatX weighted = wrench_weight.asDiagonal() * grasp;
  QpProblem qp;
  qp.H = 2.0 * (grasp.transpose() * weighted + g.force_regularization * MatX::Identity(d, d));
  qp.f = -2.0 * weighted.transpose() * desired;
  qp.A_in = MatX::Zero(6 * static_cast<int>(legs.size()), d);
  qp.b_in = VecX::Zero(qp.A_in.rows());
  int row = 0;
  for (std::size_t k = 0; k < legs.size(); ++k) {
    const int c = 3 * static_cast<int>(k);
    for (int axis = 0; axis < 2; ++axis) {
      for (double sign : {-1.0, 1.0}) {
        qp.A_in(row, c + 2) = p.mu;
        qp.A_in(row++, c + axis) = sign;
      }
    }
    qp.A_in(row, c + 2) = 1.0;
    qp.b_in[row++] = p.u_min;
    qp.A_in(row, c + 2) = -1.0;
    qp.b_in[row++] = -p.u_max;
  }
  const QpSolution sol = solve_qp(qp);
  if (!sol.ok()) throw MpcFailure(std::string("force distribution QP failed: ") + to_string(sol.status), sol.status);
  for (std::size_t k = 0; k < legs.size(); ++k) forces[legs[k]] = sol.x.segment<3>(3 * static_cast<int>(k));
  return forces;
}

void write_vec(std::ostream& os, const Vec3& v) { os << ',' << v.x() << ',' << v.y() << ',' << v.z(); }

}  // namespace

const char* to_string(ControllerMode m) {
  switch (m) {
    case ControllerMode::MpcIc:
      return "mpc+ic";
    case ControllerMode::Mpc:
      return "mpc";
    case ControllerMode::Qp:
      return "qp";
  }
  return "unknown";
}

const char* to_string(SimOutcome o) {
  switch (o) {
    case SimOutcome::Completed:
      return "completed";
    case SimOutcome::Fall:
      return "fall";
    case SimOutcome::ControllerFailure:
      return "controller_failure";
  }
  return "unknown";
}

UserCommand command_at(const std::vector<CommandKey>& profile, double t) {
  UserCommand c;
  if (profile.empty()) return c;
  if (t <= profile.front().t) {
    c.velocity = profile.front().velocity;
    c.yaw_rate = profile.front().yaw_rate;
    return c;
  }
  for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
    const CommandKey& a = profile[i];
    const CommandKey& b = profile[i + 1];
    if (t < b.t) {
      const double w = (b.t > a.t) ? (t - a.t) / (b.t - a.t) : 1.0;
      c.velocity = a.velocity + w * (b.velocity - a.velocity);
      c.yaw_rate = a.yaw_rate + w * (b.yaw_rate - a.yaw_rate);
      return c;
    }
  }
  c.velocity = profile.back().velocity;
  c.yaw_rate = profile.back().yaw_rate;
  return c;
}

int SimConfig::physics_per_task() const {
  return static_cast<int>(std::lround(1.0 / (task_rate * physics_dt)));
}

int SimConfig::tasks_per_mpc() const { return static_cast<int>(std::lround(task_rate / mpc_rate)); }

void SimConfig::validate() const {
  if (!(physics_dt > 0.0 && task_rate > 0.0 && mpc_rate > 0.0 && duration > 0.0)) {
    throw std::invalid_argument("rates and duration must be positive");
  }
  const double steps = 1.0 / (task_rate * physics_dt);
  const double tasks = task_rate / mpc_rate;
  if (std::abs(steps - std::round(steps)) > 1e-9 || std::round(steps) < 1.0) {
    throw std::invalid_argument("physics step must divide the task period");
  }
  if (std::abs(tasks - std::round(tasks)) > 1e-9 || std::round(tasks) < 1.0) {
    throw std::invalid_argument("task period must divide the MPC period");
  }
  if (terrain.width() == 0) throw std::invalid_argument("no terrain");
  for (const Disturbance& d : disturbances) {
    if (!(d.duration > 0.0)) throw std::invalid_argument("disturbance duration must be positive");
  }
  for (std::size_t i = 1; i < command.size(); ++i) {
    if (command[i].t < command[i - 1].t) throw std::invalid_argument("command keyframes out of order");
  }
  planner.gait.validate();
  planner.robot.validate();
}

TrunkState step_physics(const TrunkState& s, const FootPositions& feet,
                        const std::array<Vec3, kNumLegs>& forces, const Wrench& leg_wrench,
                        const Wrench& disturbance, const RobotParams& params, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("physics step must be positive");
  Vec3 force = params.mass * gravity_vector() + force_part(leg_wrench) + force_part(disturbance);
  Vec3 torque = torque_part(leg_wrench) + torque_part(disturbance);
  for (int i = 0; i < kNumLegs; ++i) {
    force += forces[i];
    torque += (feet[i] - s.position).cross(forces[i]);
  }
  const Mat3 inertia_w = s.rotation * params.inertia * s.rotation.transpose();
  const Vec3 omega_dot = inertia_w.ldlt().solve(torque - s.omega.cross(inertia_w * s.omega));

  TrunkState n;
  n.velocity = s.velocity + dt * force / params.mass;
  n.omega = s.omega + dt * omega_dot;
  n.position = s.position + dt * n.velocity;
  n.rotation = exp_so3(n.omega * dt) * s.rotation;
  n.angles = euler_from_rotation(n.rotation);
  n.angles.yaw = s.angles.yaw + std::remainder(n.angles.yaw - s.angles.yaw, 2.0 * std::numbers::pi);
  if (std::abs(n.angles.pitch) >= std::numbers::pi / 2.0 - kSingularityMargin) {
    throw SingularOrientation("trunk pitch reached the Euler singularity");
  }
  return n;
}

double distance_to_edge(const HeightMap& map, const Vec2& p, double threshold, double search) {
  const double res = map.resolution();
  const CellIndex c = map.cell_of(p);
  const int reach = static_cast<int>(std::ceil(search / res)) + 1;
  double best = std::numeric_limits<double>::infinity();
  const auto hard = [&](const CellIndex& a, const CellIndex& b) {
    if (!map.in_bounds(a) || !map.in_bounds(b)) return false;
    if (!map.known(a) || !map.known(b)) return true;
    return std::abs(map.at(a) - map.at(b)) >= threshold;
  };
  const auto seg_dist = [&](const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double t = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    return (p - (a + t * ab)).norm();
  };
  for (int r = c.row - reach; r <= c.row + reach; ++r) {
    for (int q = c.col - reach; q <= c.col + reach; ++q) {
      const CellIndex a{r, q};
      const Vec2 corner = map.cell_center(a) - Vec2(0.5 * res, 0.5 * res);
      if (hard(a, {r, q + 1})) {
        best = std::min(best, seg_dist(corner + Vec2(res, 0.0), corner + Vec2(res, res)));
      }
      if (hard(a, {r + 1, q})) {
        best = std::min(best, seg_dist(corner + Vec2(0.0, res), corner + Vec2(res, res)));
      }
    }
  }
  return best;
}

RobotState initial_state(const SimConfig& cfg) {
  RobotState s;
  s.angles.yaw = cfg.start_yaw;
  double mean_z = 0.0;
  for (int i = 0; i < kNumLegs; ++i) {
    const Vec2 xy =
        cfg.start_xy + rot_z(cfg.start_yaw).topLeftCorner<2, 2>() * cfg.planner.nominal_stance[i];
    const auto z = cfg.terrain.height_at(xy);
    if (!z) throw TerrainError("initial foot outside the known terrain");
    s.feet[i] = Vec3(xy.x(), xy.y(), *z);
    mean_z += *z / kNumLegs;
  }
  s.position = Vec3(cfg.start_xy.x(), cfg.start_xy.y(), mean_z + cfg.planner.reference.body_height);
  return s;
}

SimLog run_closed_loop(const SimConfig& cfg) {
  cfg.validate();
  const PlannerConfig& pc = cfg.planner;
  const GaitParams& gait = pc.gait;
  const RobotParams& robot = pc.robot;
  const HeightMap& map = cfg.terrain;
  const int sub = cfg.physics_per_task();
  const int per_mpc = cfg.tasks_per_mpc();
  const double task_dt = 1.0 / cfg.task_rate;
  const double mpc_period = 1.0 / cfg.mpc_rate;
  const ForceBounds bounds{robot.mu, robot.u_min, robot.u_max};
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  SimLog log;

  const RobotState start = initial_state(cfg);
  TrunkState trunk;
  trunk.angles = start.angles;
  trunk.rotation = rotation_from_euler(trunk.angles);
  trunk.position = start.position;
  std::array<LegRuntime, kNumLegs> legs;
  for (int i = 0; i < kNumLegs; ++i) legs[i].foot = start.feet[i];
  const double mean_z = start.position.z() - pc.reference.body_height;

  PlanBuffer buffer;
  FootPositions plan_feet{};
  StateVec last_ref = StateVec::Zero();
  bool have_ref = false;

  const auto feet_now = [&]() {
    FootPositions f;
    for (int i = 0; i < kNumLegs; ++i) f[i] = legs[i].foot;
    return f;
  };
  const auto planner_input = [&](double gait_phase, const UserCommand& cmd) {
    PlannerInput in;
    in.state.angles = trunk.angles;
    in.state.position = trunk.position;
    if (cfg.position_noise > 0.0) {
      for (int a = 0; a < 3; ++a) in.state.position[a] += cfg.position_noise * noise(rng);
    }
    in.state.omega = trunk.omega;
    in.state.velocity = trunk.velocity;
    in.state.feet = feet_now();
    in.gait_phase = gait_phase;
    for (int i = 0; i < kNumLegs; ++i) {
      in.swing_elapsed[i] =
          legs[i].stance ? 0.0 : swing_phase(gait, i, gait_phase) * gait.swing_time();
    }
    in.command = cmd;
    return in;
  };

  const double margin = pc.foothold.edge_margin;
  const long total_ticks = std::lround(cfg.duration * cfg.task_rate);
  LegFlags prev_stance{true, true, true, true};

  try {
    for (long tick = 0; tick < total_ticks; ++tick) {
      const double t = tick * task_dt;
      const double gait_phase = std::fmod(t * gait.step_frequency, 1.0);
      const UserCommand cmd = command_at(cfg.command, t);
      const LegFlags stance = gait.stance_flags(gait_phase);

      // Lift-offs: plan the swing towards the foothold predicted now.
      for (int i = 0; i < kNumLegs; ++i) {
        if (prev_stance[i] && !stance[i]) {
          legs[i].stance = false;
          const PlannerInput in = planner_input(gait_phase, cmd);
          const ContactSchedule sched = build_schedule(gait, gait_phase, in.swing_elapsed);
          ContactSequenceInput cs{{in.state.position, in.state.velocity, in.state.angles.yaw},
                                  in.state.feet, cmd.velocity, pc.nominal_stance};
          const ContactSequence seq = build_contact_sequence(cs, sched, map, gait, pc.foothold);
          const int k = seq.first_touchdown(i);
          legs[i].predicted = seq.at(k, i);
          legs[i].t_liftoff = t;
          legs[i].swing = SwingTrajectory(legs[i].foot, legs[i].predicted,
                                          pc.foothold.swing_apex_height, gait.swing_time());
        }
      }
      // Touchdowns: the foot lands on the current swing target.
      for (int i = 0; i < kNumLegs; ++i) {
        if (!prev_stance[i] && stance[i]) {
          legs[i].stance = true;
          legs[i].foot = legs[i].swing.target();
          FootholdEvent ev;
          ev.leg = i;
          ev.t_liftoff = legs[i].t_liftoff;
          ev.t_touchdown = t;
          ev.predicted = legs[i].predicted;
          ev.landing = legs[i].foot;
          ev.error = (ev.landing - ev.predicted).norm();
          legs[i].last_error = ev.error;
          log.footholds.push_back(ev);
          const double d = distance_to_edge(map, ev.landing.head<2>(), pc.foothold.edge_threshold,
                                            2.0 * margin);
          log.max_edge_violation = std::max(log.max_edge_violation, margin - d);
        }
      }
      prev_stance = stance;

      // Planning (and the MPC solve) at the MPC rate.
      if (tick % per_mpc == 0) {
        const PlannerInput in = planner_input(gait_phase, cmd);
        const bool solve = cfg.mode != ControllerMode::Qp;
        HorizonPlan hp = plan_horizon(in, map, pc, solve);
        last_ref = hp.reference.samples.at(1);
        have_ref = true;
        for (int i = 0; i < kNumLegs; ++i) {
          if (legs[i].stance || swing_phase(gait, i, gait_phase) >= cfg.retarget_freeze) continue;
          const int k = hp.contacts.first_touchdown(i);
          if (k > 0) legs[i].swing.retarget(swing_phase(gait, i, gait_phase), hp.contacts.at(k, i));
        }
        if (solve) {
          hp.plan.stamp = t;
          SolveRecord rec;
          rec.t = t;
          rec.status = hp.plan.status;
          rec.iterations = hp.plan.iterations;
          rec.objective = hp.plan.objective;
          rec.solve_ms = hp.plan.solve_ms;
          rec.violation = constraint_violation(hp.plan, robot);
          rec.first = hp.plan.first;
          log.solves.push_back(rec);
          plan_feet = hp.feet.front();
          buffer.publish(std::make_shared<const GrfPlan>(std::move(hp.plan)));
        }
      }

      // Joint motion and the compensation wrench at the task rate.
      std::array<LegMotion, kNumLegs> motion;
      Vec12 qdd_des = Vec12::Zero();
      Vec12 q = Vec12::Zero();
      for (int i = 0; i < kNumLegs; ++i) {
        if (legs[i].stance) {
          motion[i] = leg_motion(cfg.legs, i, trunk, legs[i].foot, Vec3::Zero(), Vec3::Zero());
        } else {
          const SwingSample s = legs[i].swing.sample(swing_phase(gait, i, gait_phase));
          motion[i] = leg_motion(cfg.legs, i, trunk, s.position, s.velocity, s.acceleration);
        }
        q.segment<3>(3 * i) = motion[i].q;
        qdd_des.segment<3>(3 * i) = motion[i].qdd;
      }

      TickRecord rec;
      rec.t = t;
      rec.gait_phase = gait_phase;
      rec.stance = stance;
      const FootPositions feet = feet_now();
      std::array<Vec3, kNumLegs> forces{};
      if (cfg.mode == ControllerMode::Qp) {
        if (!have_ref) throw std::logic_error("no reference available");
        forces = qp_ablation_forces(cfg, trunk, feet, stance, cmd, last_ref, rec.w_d);
      } else {
        const std::shared_ptr<const GrfPlan> plan = buffer.latest();
        if (!plan || t - plan->stamp > mpc_period + 1e-9) {
          throw std::logic_error("MPC plan older than one MPC period");
        }
        std::array<Vec3, kNumLegs> base{};
        std::array<Vec3, kNumLegs> planned{};
        for (int i = 0; i < kNumLegs; ++i) {
          planned[i] = plan->stance.front()[i] ? plan->first[i] : Vec3::Zero();
          base[i] = stance[i] ? planned[i] : Vec3::Zero();
        }
        rec.w_mpc = wrench_from_forces(planned, plan_feet, trunk.position);
        if (cfg.mode == ControllerMode::MpcIc) {
          rec.w_l = compensation_wrench(cross_inertia(cfg.legs, trunk.position, trunk.rotation, q), qdd_des);
        }
        rec.w_d = rec.w_mpc + rec.w_l;
        forces = distribute_wrench(rec.w_d, feet, stance, trunk.position, bounds, base).forces;
      }

      rec.angles = trunk.angles;
      rec.position = trunk.position;
      rec.omega = trunk.omega;
      rec.velocity = trunk.velocity;
      rec.ref_angles = EulerZYX::from_vec(last_ref.segment<3>(sx::kAngles));
      rec.ref_position = last_ref.segment<3>(sx::kPosition);
      rec.ref_velocity = last_ref.segment<3>(sx::kVelocity);
      rec.forces = forces;
      for (int i = 0; i < kNumLegs; ++i) rec.foothold_error[i] = legs[i].last_error;
      log.ticks.push_back(rec);

      // Plant at the physics rate with forces held over the task period.
      for (int s = 0; s < sub; ++s) {
        const double ts = t + s * cfg.physics_dt;
        const double phase_s = std::fmod(ts * gait.step_frequency, 1.0);
        std::array<LegMotion, kNumLegs> m;
        for (int i = 0; i < kNumLegs; ++i) {
          if (legs[i].stance) {
            m[i] = leg_motion(cfg.legs, i, trunk, legs[i].foot, Vec3::Zero(), Vec3::Zero());
          } else {
            const SwingSample smp = legs[i].swing.sample(swing_phase(gait, i, phase_s));
            m[i] = leg_motion(cfg.legs, i, trunk, smp.position, smp.velocity, smp.acceleration);
          }
        }
        std::array<Vec3, kNumLegs> applied{};
        for (int i = 0; i < kNumLegs; ++i) applied[i] = legs[i].stance ? forces[i] : Vec3::Zero();
        trunk = step_physics(trunk, feet, applied, leg_reaction(cfg.legs, trunk, m),
                             disturbance_at(cfg.disturbances, ts), robot, cfg.physics_dt);
      }
      log.end_time = t + task_dt;

      if (cfg.goal_x && trunk.position.x() >= *cfg.goal_x) log.goal_reached = true;
      const double ground = map.height_at(trunk.position.head<2>()).value_or(mean_z);
      if (std::abs(trunk.angles.roll) > cfg.max_tilt || std::abs(trunk.angles.pitch) > cfg.max_tilt ||
          trunk.position.z() - ground < cfg.min_clearance) {
        log.outcome = SimOutcome::Fall;
        log.message = "fall detected at t = " + std::to_string(log.end_time) + " s";
        spdlog::warn("{}", log.message);
        break;
      }
    }
  } catch (const WorkspaceLimit& e) {
    log.outcome = SimOutcome::Fall;
    log.message = e.what();
  } catch (const SingularOrientation& e) {
    log.outcome = SimOutcome::Fall;
    log.message = e.what();
  } catch (const NoSafeFoothold& e) {
    log.outcome = SimOutcome::ControllerFailure;
    log.message = e.what();
  } catch (const MpcFailure& e) {
    log.outcome = SimOutcome::ControllerFailure;
    log.message = e.what();
  } catch (const TerrainError& e) {
    log.outcome = SimOutcome::ControllerFailure;
    log.message = e.what();
  }
  if (log.outcome == SimOutcome::ControllerFailure) spdlog::error("{}", log.message);
  return log;
}

void SimLog::write_ticks_csv(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "# " << kSimLogSchema << '\n';
  os << "t,gait_phase,roll,pitch,yaw,x,y,z,wx,wy,wz,vx,vy,vz,ref_roll,ref_pitch,ref_yaw,ref_x,ref_y,"
        "ref_z,ref_vx,ref_vy,ref_vz";
  for (int i = 0; i < kNumLegs; ++i) {
    for (char a : {'x', 'y', 'z'}) os << ",F_" << leg_name(i) << '_' << a;
  }
  for (const char* w : {"w_mpc", "w_l", "w_d"}) {
    for (const char* c : {"tx", "ty", "tz", "fx", "fy", "fz"}) os << ',' << w << '_' << c;
  }
  for (int i = 0; i < kNumLegs; ++i) os << ",stance_" << leg_name(i);
  for (int i = 0; i < kNumLegs; ++i) os << ",e_" << leg_name(i);
  os << '\n' << std::setprecision(9);
  for (const TickRecord& r : ticks) {
    os << r.t << ',' << r.gait_phase;
    write_vec(os, r.angles.vec());
    write_vec(os, r.position);
    write_vec(os, r.omega);
    write_vec(os, r.velocity);
    write_vec(os, r.ref_angles.vec());
    write_vec(os, r.ref_position);
    write_vec(os, r.ref_velocity);
    for (const Vec3& f : r.forces) write_vec(os, f);
    for (const Wrench* w : {&r.w_mpc, &r.w_l, &r.w_d}) {
      write_vec(os, torque_part(*w));
      write_vec(os, force_part(*w));
    }
    for (bool s : r.stance) os << ',' << (s ? 1 : 0);
    for (double e : r.foothold_error) os << ',' << e;
    os << '\n';
  }
}

void SimLog::write_footholds_csv(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "# " << kSimLogSchema << "\nleg,t_liftoff,t_touchdown,pred_x,pred_y,pred_z,land_x,land_y,land_z,e\n"
     << std::setprecision(9);
  for (const FootholdEvent& e : footholds) {
    os << leg_name(e.leg) << ',' << e.t_liftoff << ',' << e.t_touchdown;
    write_vec(os, e.predicted);
    write_vec(os, e.landing);
    os << ',' << e.error << '\n';
  }
}

void SimLog::write_solves_csv(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "# " << kSimLogSchema << "\nt,status,iterations,objective,violation";
  for (int i = 0; i < kNumLegs; ++i) {
    for (char a : {'x', 'y', 'z'}) os << ",F_" << leg_name(i) << '_' << a;
  }
  os << '\n' << std::setprecision(9);
  for (const SolveRecord& s : solves) {
    os << s.t << ',' << to_string(s.status) << ',' << s.iterations << ',' << s.objective << ','
       << s.violation;
    for (const Vec3& f : s.first) write_vec(os, f);
    os << '\n';
  }
}

}  // namespace legmpc
