#include <gtest/gtest.h>

#include "legmpc/gait.hpp"

using namespace legmpc;

namespace {
const GaitParams kTrot = GaitParams::trot(0.6, 1.4);
}

TEST(Gait, Durations) {
  EXPECT_NEAR(kTrot.swing_time(), 0.4 / 1.4, 1e-15);
  EXPECT_NEAR(kTrot.stance_time(), 0.6 / 1.4, 1e-15);
  EXPECT_NEAR(kTrot.cycle_time(), 1.0 / 1.4, 1e-15);
}

TEST(Gait, ValidateRejectsBadParams) {
  EXPECT_THROW(GaitParams::trot(1.0, 1.4).validate(), std::invalid_argument);
  EXPECT_THROW(GaitParams::trot(0.6, 0.0).validate(), std::invalid_argument);
  GaitParams g = kTrot;
  g.phase_offsets[2] = 1.0;
  EXPECT_THROW(g.validate(), std::invalid_argument);
}

TEST(Gait, SixteenStanceChangesOverTwoCycles) {
  const ContactSchedule s = build_schedule(kTrot, 0.3, {});
  ASSERT_EQ(s.events.size(), 17u);
  EXPECT_EQ(s.per_leg_event_count(), 16);
  EXPECT_EQ(s.events[0].dt, 0.0);
  EXPECT_NEAR(s.span, 2.0 / 1.4, 1e-15);
  for (std::size_t k = 1; k < s.events.size(); ++k) {
    EXPECT_GE(s.events[k].dt, s.events[k - 1].dt);
    EXPECT_LE(s.events[k].dt, s.span + 1e-12);
    EXPECT_NE(s.events[k].flags, s.events[k - 1].flags);
  }
}

TEST(Gait, TouchdownAfterFreshLiftoff) {
  // Phase 0.6: LF and RH have just lifted off.
  const ContactSchedule s = build_schedule(kTrot, 0.6, {0.0, 0.0, 0.0, 0.0});
  for (const StanceChange& e : s.events) {
    if (e.leg == 0 && e.touchdown) {
      EXPECT_NEAR(e.dt, 0.4 / 1.4, 1e-12);
      break;
    }
  }
}

TEST(Gait, ElapsedSwingShortensTouchdown) {
  const ContactSchedule s = build_schedule(kTrot, 0.7, {0.1 / 1.4, 0.0, 0.0, 0.1 / 1.4});
  for (const StanceChange& e : s.events) {
    if (e.leg == 3 && e.touchdown) {
      EXPECT_NEAR(e.dt, 0.3 / 1.4, 1e-12);
      break;
    }
  }
}

TEST(Gait, SwingClockInconsistencyThrows) {
  EXPECT_THROW(build_schedule(kTrot, 0.7, {0.5, 0.0, 0.0, 0.0}), std::invalid_argument);
  EXPECT_THROW(build_schedule(kTrot, 0.7, {-0.01, 0.0, 0.0, 0.0}), std::invalid_argument);
}

TEST(Gait, DiagonalPairsMove) {
  const ContactSchedule s = build_schedule(kTrot, 0.0, {});
  // Each pair event appears twice (one per leg) and once in the merged view.
  const auto merged = s.merged();
  EXPECT_EQ(merged.size(), 9u);
  for (const auto& e : merged) {
    EXPECT_EQ(e.flags[0], e.flags[3]);
    EXPECT_EQ(e.flags[1], e.flags[2]);
  }
}

TEST(Gait, FlagsAt) {
  const ContactSchedule s = build_schedule(kTrot, 0.7, {0.1 / 1.4, 0.0, 0.0, 0.1 / 1.4});
  EXPECT_EQ(contact_flags_at(s, 0.0), s.events[0].flags);
  EXPECT_EQ(contact_flags_at(s, s.events[1].dt - 1e-6), s.events[0].flags);
  EXPECT_EQ(contact_flags_at(s, 0.5 * s.cycle), kTrot.stance_flags(0.7 + 0.5));
  EXPECT_EQ(contact_flags_at(s, 0.5 * s.cycle), (LegFlags{true, false, false, true}));
  EXPECT_EQ(contact_flags_at(s, 0.0), (LegFlags{false, true, true, false}));
  EXPECT_THROW(contact_flags_at(s, -0.1), std::out_of_range);
  EXPECT_THROW(contact_flags_at(s, s.span + 0.1), std::out_of_range);
}

TEST(Gait, PeriodicAndDutyFraction) {
  // RF and LH are 0.15 of a cycle into their swing.
  const double e = 0.15 / 1.4;
  const ContactSchedule s = build_schedule(kTrot, 0.25, {0.0, e, e, 0.0});
  // Second-cycle events equal first-cycle events shifted by the cycle time.
  std::vector<StanceChange> first, second;
  for (std::size_t k = 1; k < s.events.size(); ++k) {
    (s.events[k].dt < s.cycle - 1e-12 ? first : second).push_back(s.events[k]);
  }
  ASSERT_EQ(first.size(), second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    EXPECT_NEAR(second[i].dt - first[i].dt, s.cycle, 1e-12);
    EXPECT_EQ(second[i].leg, first[i].leg);
    EXPECT_EQ(second[i].touchdown, first[i].touchdown);
  }
  // Contact fraction of each leg over one cycle.
  for (int leg = 0; leg < kNumLegs; ++leg) {
    double in_contact = 0.0;
    const int samples = 10000;
    for (int i = 0; i < samples; ++i) {
      in_contact += contact_flags_at(s, (i + 0.5) * s.cycle / samples)[leg] ? 1.0 : 0.0;
    }
    EXPECT_NEAR(in_contact / samples, 0.6, 1e-3);
  }
}
