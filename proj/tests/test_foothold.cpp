#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "legmpc/foothold.hpp"
#include "oracles.hpp"

using namespace legmpc;

namespace {

const GaitParams kTrot = GaitParams::trot(0.6, 1.4);

const NominalStance kStance{Vec2(0.35, 0.2), Vec2(0.35, -0.2), Vec2(-0.35, 0.2), Vec2(-0.35, -0.2)};

HeightMap beam_field() {
  return parse_heightmap(R"({
    "origin": [-1.0, -1.0], "resolution": 0.02, "width": 200, "height": 100,
    "boxes": [{"min": [0.3, -1.0], "max": [0.5, 1.0], "height": 0.15}]
  })");
}

ContactSequenceInput walking_input(double vx) {
  ContactSequenceInput in;
  in.base.position = Vec3(0.0, 0.0, 0.5);
  in.base.velocity = Vec3(vx, 0.0, 0.0);
  in.commanded_velocity = Vec2(vx, 0.0);
  in.nominal_stance = kStance;
  for (int i = 0; i < kNumLegs; ++i) in.current_feet[i] = Vec3(kStance[i].x(), kStance[i].y(), 0.0);
  return in;
}

double stddev3x3(const HeightMap& m, const CellIndex& c) {
  std::vector<double> z;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const CellIndex q{c.row + dr, c.col + dc};
      if (m.in_bounds(q) && m.known(q)) z.push_back(m.at(q));
    }
  }
  double mean = 0.0;
  for (double v : z) mean += v / z.size();
  double var = 0.0;
  for (double v : z) var += (v - mean) * (v - mean) / z.size();
  return std::sqrt(var);
}

}  // namespace

TEST(Foothold, PredictionExamples) {
  const FootholdPrediction p =
      predict_foothold(0, {0.3, 0.2, 0.0}, {0.2, 0.0, 0.0}, 0.5, {0.4, 0.1, 0.0});
  EXPECT_NEAR((p.position - Vec3(0.6, 0.25, 0.0)).norm(), 0.0, 1e-15);
  const FootholdPrediction still = predict_foothold(1, {0.3, -0.2, 0.0}, Vec3::Zero(), 0.0, Vec3::Zero());
  EXPECT_EQ(still.position, Vec3(0.3, -0.2, 0.0));
  EXPECT_THROW(predict_foothold(0, Vec3::Zero(), Vec3::Zero(), -0.1, Vec3::Zero()),
               std::invalid_argument);
}

TEST(Foothold, FlatCropKeepsNominal) {
  const HeightMap m = HeightMap::flat({-1.0, -1.0}, 0.02, 100, 100);
  const HeightMap c = crop(m, {0.1, 0.1}, 0.34);
  const CellIndex nominal = c.cell_of({0.1, 0.1});
  const FootholdChoice f = evaluate_foothold(c, nominal, {Vec3(-0.2, 0.1, 0.0), 0.1}, FootholdConfig{});
  EXPECT_EQ(f.cell.row, nominal.row);
  EXPECT_EQ(f.cell.col, nominal.col);
  EXPECT_EQ(f.adjustment, Vec2::Zero());
  EXPECT_EQ(f.cost, 0.0);
}

TEST(Foothold, MovesAwayFromBeamEdge) {
  const HeightMap m = beam_field();
  const FootholdConfig cfg;
  // Nominal lands on the beam, 1 cm from its front edge.
  const Vec2 nominal_xy(0.31, 0.0);
  const HeightMap c = crop(m, nominal_xy, 0.34);
  const FootholdChoice f = evaluate_foothold(c, c.cell_of(nominal_xy), {Vec3(0.0, 0.0, 0.0), 0.25}, cfg);
  const double d = oracle::edge_distance(m, f.position.head<2>(), cfg.edge_threshold);
  EXPECT_GE(d, cfg.edge_margin - 1e-12);
  EXPECT_GT(f.adjustment.norm(), 0.0);
  EXPECT_LE(f.adjustment.norm(), cfg.crop_half_extent + 1e-12);
}

TEST(Foothold, AllUnknownThrows) {
  const HeightMap m = HeightMap::flat({0.0, 0.0}, 0.02, 10, 10);
  const HeightMap c = crop(m, {5.0, 5.0}, 0.2);
  EXPECT_THROW(evaluate_foothold(c, {c.height() / 2, c.width() / 2}, {}, FootholdConfig{}),
               NoSafeFoothold);
}

TEST(Foothold, NominalOutsideCropThrows) {
  const HeightMap m = HeightMap::flat({0.0, 0.0}, 0.02, 50, 50);
  const HeightMap c = crop(m, {0.5, 0.5}, 0.2);
  EXPECT_THROW(evaluate_foothold(c, {-1, 0}, {}, FootholdConfig{}), std::invalid_argument);
}

TEST(Foothold, CostMatchesIndependentRecomputation) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> h(0.0, 0.01);  // below the edge threshold everywhere
  std::vector<double> z(60 * 60);
  for (double& v : z) v = h(rng);
  const HeightMap m({0.0, 0.0}, 0.02, 60, 60, z);
  FootholdConfig cfg;
  cfg.w_roughness = 3.0;
  const Vec2 center(0.6, 0.6);
  const HeightMap c = crop(m, center, 0.36);
  const CellIndex nominal = c.cell_of(center);
  // Swing origin far below the apex so nothing collides.
  const FootholdChoice f = evaluate_foothold(c, nominal, {Vec3(0.6, 0.4, 0.0), 0.3}, cfg);

  double best = std::numeric_limits<double>::infinity();
  int finite = 0;
  for (int r = 0; r < c.height(); ++r) {
    for (int q = 0; q < c.width(); ++q) {
      const double s = f.scores[c.flat_index({r, q})];
      if (!std::isfinite(s)) continue;
      ++finite;
      best = std::min(best, s);
      const double adjust = std::hypot(r - nominal.row, q - nominal.col) * c.resolution();
      EXPECT_NEAR(s, cfg.w_roughness * stddev3x3(c, {r, q}) + cfg.w_adjustment * adjust, 1e-12);
      EXPECT_LE(adjust, cfg.crop_half_extent + 1e-12);
    }
  }
  EXPECT_GT(finite, 100);
  EXPECT_EQ(f.cost, best);
  EXPECT_EQ(f.scores[c.flat_index(f.cell)], best);
}

TEST(Foothold, TranslationInvariant) {
  const HeightMap a = beam_field();
  const HeightMap b = parse_heightmap(R"({
    "origin": [0.0, -1.0], "resolution": 0.02, "width": 200, "height": 100,
    "boxes": [{"min": [1.3, -1.0], "max": [1.5, 1.0], "height": 0.15}]
  })");
  const Vec2 shift(1.0, 0.0);
  const Vec2 pa(0.29, 0.03);
  const HeightMap ca = crop(a, pa, 0.34), cb = crop(b, pa + shift, 0.34);
  const FootholdChoice fa = evaluate_foothold(ca, ca.cell_of(pa), {Vec3(0.0, 0.0, 0.0), 0.25}, {});
  const FootholdChoice fb =
      evaluate_foothold(cb, cb.cell_of(pa + shift), {Vec3(1.0, 0.0, 0.0), 0.25}, {});
  EXPECT_NEAR((fb.position.head<2>() - fa.position.head<2>() - shift).norm(), 0.0, 1e-9);
  EXPECT_EQ(fa.position.z(), fb.position.z());
  EXPECT_NEAR(fa.cost, fb.cost, 1e-12);
}

TEST(Foothold, FlatSequenceSpacing) {
  const HeightMap m = HeightMap::flat({-2.0, -2.0}, 0.02, 300, 200);
  const ContactSchedule s = build_schedule(kTrot, 0.0, {});
  const ContactSequence seq = build_contact_sequence(walking_input(0.4), s, m, kTrot, {});
  for (int leg = 0; leg < kNumLegs; ++leg) {
    std::vector<Vec3> touchdowns;
    for (std::size_t k = 1; k < seq.entries.size(); ++k) {
      if (seq.entries[k][leg].touchdown) touchdowns.push_back(seq.entries[k][leg].position);
    }
    ASSERT_GE(touchdowns.size(), 2u);
    for (std::size_t i = 1; i < touchdowns.size(); ++i) {
      EXPECT_NEAR(touchdowns[i].x() - touchdowns[i - 1].x(), 0.4 / 1.4, 0.02 + 1e-9);
      EXPECT_NEAR(touchdowns[i].y() - touchdowns[i - 1].y(), 0.0, 1e-12);
    }
  }
}

TEST(Foothold, StandingStillKeepsCurrentFeet) {
  // Feet at cell centres so quantization is exact.
  const HeightMap m = HeightMap::flat({-1.0, -1.01}, 0.02, 101, 101);
  ContactSequenceInput in = walking_input(0.0);
  const ContactSchedule s = build_schedule(kTrot, 0.0, {});
  const ContactSequence seq = build_contact_sequence(in, s, m, kTrot, {});
  for (std::size_t k = 0; k < seq.entries.size(); ++k) {
    for (int leg = 0; leg < kNumLegs; ++leg) {
      EXPECT_NEAR((seq.at(static_cast<int>(k), leg) - in.current_feet[leg]).norm(), 0.0, 1e-12);
    }
  }
  for (int leg = 0; leg < kNumLegs; ++leg) EXPECT_GT(seq.first_touchdown(leg), 0);
}

TEST(Foothold, SequenceAvoidsBeamEdges) {
  const HeightMap m = beam_field();
  const FootholdConfig cfg;
  for (double phase : {0.0, 0.2, 0.5, 0.8}) {
    ContactSequenceInput in = walking_input(0.4);
    in.base.position.x() = -0.4;
    for (int i = 0; i < kNumLegs; ++i) in.current_feet[i].x() -= 0.4;
    const ContactSchedule s = build_schedule(kTrot, phase, {});
    int on_beam = 0;
    const ContactSequence seq = build_contact_sequence(
        in, s, m, kTrot, cfg, [&](int, int, const HeightMap&, const FootholdChoice& c) {
          if (c.position.z() > 0.1) ++on_beam;
          EXPECT_GE(oracle::edge_distance(m, c.position.head<2>(), cfg.edge_threshold),
                    cfg.edge_margin - 1e-12);
        });
    EXPECT_GT(on_beam, 0);
    for (std::size_t k = 1; k < seq.entries.size(); ++k) {
      for (const ContactEntry& e : seq.entries[k]) {
        if (!e.touchdown) continue;
        EXPECT_EQ(e.position.z(), *m.height_at(e.position.head<2>()));
      }
    }
  }
}

TEST(Foothold, GapAheadThrowsWithLegAndIndex) {
  const HeightMap m = parse_heightmap(R"({
    "origin": [-1.0, -1.0], "resolution": 0.02, "width": 200, "height": 100,
    "unknown": [{"min": [-1.0, -1.0], "max": [3.0, 1.0]}]
  })");
  const ContactSchedule s = build_schedule(kTrot, 0.0, {});
  try {
    build_contact_sequence(walking_input(0.4), s, m, kTrot, {});
    FAIL() << "expected NoSafeFoothold";
  } catch (const NoSafeFoothold& e) {
    EXPECT_GE(e.leg, 0);
    EXPECT_GE(e.stance_change, 1);
  }
}
