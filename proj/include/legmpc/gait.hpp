#pragma once

#include <vector>

#include "legmpc/types.hpp"

namespace legmpc {

/// Periodic gait: shared duty factor and step frequency, per-leg phase offsets.
struct GaitParams {
  double duty_factor = 0.6;
  double step_frequency = 1.4;  // Hz
  std::array<double, kNumLegs> phase_offsets{0.0, 0.5, 0.5, 0.0};

  static GaitParams trot(double duty_factor = 0.6, double step_frequency = 1.4) {
    return {duty_factor, step_frequency, {0.0, 0.5, 0.5, 0.0}};
  }

  double cycle_time() const { return 1.0 / step_frequency; }
  double stance_time() const { return duty_factor / step_frequency; }
  double swing_time() const { return (1.0 - duty_factor) / step_frequency; }

  /// Throws std::invalid_argument when out of range.
  void validate() const;

  /// Phase of one leg in [0, 1) for a global gait phase; stance while < duty_factor.
  double leg_phase(int leg, double gait_phase) const;
  bool in_stance(int leg, double gait_phase) const;
  LegFlags stance_flags(double gait_phase) const;
};

struct StanceChange {
  double dt = 0.0;  // seconds from now
  int leg = -1;     // -1 for the initial entry
  bool touchdown = false;
  LegFlags flags{};  // contact flags after this event
};

/// Stance changes over the next two gait cycles. Entry 0 is "now"; entries
/// 1..16 are individual lift-offs and touchdowns in time order (ties broken
/// by leg index). merged() collapses simultaneous events.
struct ContactSchedule {
  std::vector<StanceChange> events;
  std::array<double, kNumLegs> swing_elapsed{};
  double span = 0.0;
  double cycle = 0.0;

  int per_leg_event_count() const { return static_cast<int>(events.size()) - 1; }

  struct MergedEvent {
    double dt = 0.0;
    LegFlags flags{};
    int last_index = 0;  // index into events of the last member
  };
  std::vector<MergedEvent> merged() const;
};

inline constexpr int kStanceChanges = 16;
inline constexpr double kEventTieTolerance = 1e-12;

/// swing_times holds the elapsed swing time of every leg currently in swing
/// (ignored for stance legs). Throws std::invalid_argument on a clock
/// inconsistency (elapsed swing time outside [0, swing duration]).
ContactSchedule build_schedule(const GaitParams& params, double gait_phase,
                               const std::array<double, kNumLegs>& swing_times);

/// Flags of the latest event with dt <= t. Throws std::out_of_range outside [0, span].
LegFlags contact_flags_at(const ContactSchedule& schedule, double t);

}  // namespace legmpc
