#include "legmpc/gait.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace legmpc {

void GaitParams::validate() const {
  if (!(duty_factor > 0.0 && duty_factor < 1.0)) {
    throw std::invalid_argument("duty factor must lie in (0, 1)");
  }
  if (!(step_frequency > 0.0)) throw std::invalid_argument("step frequency must be positive");
  for (double o : phase_offsets) {
    if (!(o >= 0.0 && o < 1.0)) throw std::invalid_argument("phase offsets must lie in [0, 1)");
  }
}

double GaitParams::leg_phase(int leg, double gait_phase) const {
  const double p = gait_phase + phase_offsets.at(static_cast<std::size_t>(leg));
  return p - std::floor(p);
}

bool GaitParams::in_stance(int leg, double gait_phase) const {
  return leg_phase(leg, gait_phase) < duty_factor;
}

LegFlags GaitParams::stance_flags(double gait_phase) const {
  LegFlags f{};
  for (int i = 0; i < kNumLegs; ++i) f[i] = in_stance(i, gait_phase);
  return f;
}

std::vector<ContactSchedule::MergedEvent> ContactSchedule::merged() const {
  std::vector<MergedEvent> out;
  for (std::size_t k = 0; k < events.size(); ++k) {
    const StanceChange& e = events[k];
    if (!out.empty() && std::abs(e.dt - out.back().dt) <= kEventTieTolerance) {
      out.back().flags = e.flags;
      out.back().last_index = static_cast<int>(k);
    } else {
      out.push_back({e.dt, e.flags, static_cast<int>(k)});
    }
  }
  return out;
}

ContactSchedule build_schedule(const GaitParams& params, double gait_phase,
                               const std::array<double, kNumLegs>& swing_times) {
  params.validate();
  const double t_stance = params.stance_time();
  const double t_swing = params.swing_time();

  ContactSchedule schedule;
  schedule.cycle = params.cycle_time();
  schedule.span = 2.0 * schedule.cycle;

  LegFlags flags = params.stance_flags(gait_phase);
  std::vector<StanceChange> per_leg;
  per_leg.reserve(kStanceChanges);

  for (int leg = 0; leg < kNumLegs; ++leg) {
    double first = 0.0;
    if (flags[leg]) {
      first = (params.duty_factor - params.leg_phase(leg, gait_phase)) / params.step_frequency;
      schedule.swing_elapsed[leg] = 0.0;
    } else {
      const double elapsed = swing_times[leg];
      if (!(elapsed >= 0.0 && elapsed <= t_swing + 1e-12)) {
        throw std::invalid_argument("leg " + std::string(leg_name(leg)) + " swing time " +
                                    std::to_string(elapsed) + " s outside [0, " +
                                    std::to_string(t_swing) + "]");
      }
      first = std::max(0.0, t_swing - elapsed);
      schedule.swing_elapsed[leg] = elapsed;
    }
    // Two lift-offs and two touchdowns per leg always fit in two cycles.
    bool touchdown = !flags[leg];
    const double next_gap = touchdown ? t_stance : t_swing;
    const std::array<double, 4> times{first, first + next_gap, first + schedule.cycle,
                                      first + next_gap + schedule.cycle};
    for (double t : times) {
      per_leg.push_back({t, leg, touchdown, {}});
      touchdown = !touchdown;
    }
  }

  std::stable_sort(per_leg.begin(), per_leg.end(), [](const StanceChange& a, const StanceChange& b) {
    if (a.dt != b.dt) return a.dt < b.dt;
    return a.leg < b.leg;
  });

  schedule.events.push_back({0.0, -1, false, flags});
  for (StanceChange e : per_leg) {
    flags[e.leg] = e.touchdown;
    e.flags = flags;
    schedule.events.push_back(e);
  }
  return schedule;
}

LegFlags contact_flags_at(const ContactSchedule& schedule, double t) {
  if (schedule.events.empty()) throw std::out_of_range("empty contact schedule");
  if (!(t >= 0.0 && t <= schedule.span + kEventTieTolerance)) {
    throw std::out_of_range("time " + std::to_string(t) + " outside the schedule span");
  }
  LegFlags flags = schedule.events.front().flags;
  for (const StanceChange& e : schedule.events) {
    if (e.dt <= t + kEventTieTolerance) {
      flags = e.flags;
    } else {
      break;
    }
  }
  return flags;
}

}  // namespace legmpc
