#include "legmpc/foothold.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "legmpc/rotation.hpp"
#include "legmpc/swing.hpp"

namespace legmpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Cells needed beyond a candidate to see every boundary within `margin`.
int inspection_border(double margin, double resolution) {
  return std::max(1, static_cast<int>(std::ceil(margin / resolution + 0.5 - 1e-12)));
}

bool hard_boundary(const HeightMap& m, const CellIndex& a, const CellIndex& b, double threshold) {
  if (!m.known(a) || !m.known(b)) return true;
  return std::abs(m.at(a) - m.at(b)) >= threshold;
}

// Marks cells whose center lies closer than `margin` to the boundary segment
// between cell `a` and its neighbour in +col (vertical=false) or +row direction.
void mark_edge_band(std::vector<bool>& rejected, const HeightMap& m, const CellIndex& a,
                    bool along_row, double margin) {
  const double res = m.resolution();
  const int reach = static_cast<int>(std::ceil(margin / res)) + 1;
  for (int r = a.row - reach; r <= a.row + reach + 1; ++r) {
    for (int c = a.col - reach; c <= a.col + reach + 1; ++c) {
      const CellIndex cell{r, c};
      if (!m.in_bounds(cell)) continue;
      double across = 0.0, along = 0.0;
      if (!along_row) {  // boundary between columns a.col and a.col + 1
        across = std::abs(c + 0.5 - (a.col + 1));
        along = std::max(0.0, std::abs(r - a.row) - 0.5);
      } else {  // boundary between rows a.row and a.row + 1
        across = std::abs(r + 0.5 - (a.row + 1));
        along = std::max(0.0, std::abs(c - a.col) - 0.5);
      }
      if (std::hypot(across, along) * res < margin - 1e-12) rejected[m.flat_index(cell)] = true;
    }
  }
}

bool swing_collides(const HeightMap& crop, const SwingGeometry& swing, const Vec3& target) {
  const double res = crop.resolution();
  const double chord_xy = (target.head<2>() - swing.origin.head<2>()).norm();
  const int samples = std::max(2, static_cast<int>(std::ceil(0.5 * chord_xy / res)));
  for (int j = 0; j < samples; ++j) {
    const double chord = 0.5 + 0.5 * static_cast<double>(j) / samples;
    const double s = std::acos(1.0 - 2.0 * chord) / std::numbers::pi;
    const Vec3 p = half_ellipse_point(swing.origin, target, swing.apex_height, s);
    const CellIndex cell = crop.cell_of(p.head<2>());
    if (!crop.in_bounds(cell) || !crop.known(cell)) continue;
    if (crop.at(cell) > p.z() + 1e-9) return true;
  }
  return false;
}

double neighbourhood_stddev(const HeightMap& m, const CellIndex& c) {
  double sum = 0.0, sq = 0.0;
  int n = 0;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const CellIndex q{c.row + dr, c.col + dc};
      if (!m.in_bounds(q) || !m.known(q)) continue;
      const double z = m.at(q) - m.at(c);
      sum += z;
      sq += z * z;
      ++n;
    }
  }
  const double mean = sum / n;
  return std::sqrt(std::max(0.0, sq / n - mean * mean));
}

}  // namespace

FootholdPrediction predict_foothold(int leg, const Vec3& ellipse_center, const Vec3& step_length,
                                    double dt, const Vec3& base_velocity) {
  if (!(dt >= 0.0)) throw std::invalid_argument("time to stance change must be non-negative");
  FootholdPrediction p;
  p.leg = leg;
  p.dt = dt;
  p.ellipse_center = ellipse_center;
  p.step_length = step_length;
  p.position = ellipse_center + 0.5 * step_length + dt * base_velocity;
  return p;
}

FootholdChoice evaluate_foothold(const HeightMap& crop, const CellIndex& nominal,
                                 const SwingGeometry& swing, const FootholdConfig& config,
                                 const std::optional<ReachLimit>& reach) {
  if (!crop.in_bounds(nominal)) throw std::invalid_argument("nominal cell outside the crop");
  const int rows = crop.height(), cols = crop.width();
  const double res = crop.resolution();
  const auto n = static_cast<std::size_t>(rows) * cols;

  std::vector<bool> rejected(n, false);
  const int border = inspection_border(config.edge_margin, res);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const CellIndex cell{r, c};
      if (!crop.known(cell) || r < border || c < border || r >= rows - border ||
          c >= cols - border) {
        rejected[crop.flat_index(cell)] = true;
      }
    }
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const CellIndex a{r, c};
      if (c + 1 < cols && hard_boundary(crop, a, {r, c + 1}, config.edge_threshold)) {
        mark_edge_band(rejected, crop, a, false, config.edge_margin);
      }
      if (r + 1 < rows && hard_boundary(crop, a, {r + 1, c}, config.edge_threshold)) {
        mark_edge_band(rejected, crop, a, true, config.edge_margin);
      }
    }
  }

  FootholdChoice out;
  out.grid_side = cols;
  out.scores.assign(n, kInf);
  double best = kInf;
  std::size_t best_index = n;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const CellIndex cell{r, c};
      const std::size_t i = crop.flat_index(cell);
      if (rejected[i]) continue;
      const double adjust = std::hypot(r - nominal.row, c - nominal.col) * res;
      if (adjust > config.crop_half_extent + 1e-12) continue;
      const Vec2 xy = crop.cell_center(cell);
      if (reach && (xy - reach->center).norm() > reach->radius) continue;

      const Vec3 target(xy.x(), xy.y(), crop.at(cell));
      const double collision = swing_collides(crop, swing, target) ? 1.0 : 0.0;
      const double cost = config.w_collision * collision +
                          config.w_roughness * neighbourhood_stddev(crop, cell) +
                          config.w_adjustment * adjust;
      out.scores[i] = cost;
      if (cost < best) {
        best = cost;
        best_index = i;
      }
    }
  }
  if (best_index == n) throw NoSafeFoothold("no safe foothold in crop");

  out.cell = {static_cast<int>(best_index / cols), static_cast<int>(best_index % cols)};
  const Vec2 xy = crop.cell_center(out.cell);
  out.position = Vec3(xy.x(), xy.y(), crop.at(out.cell));
  out.adjustment = xy - crop.cell_center(nominal);
  out.cost = best;
  return out;
}

FootPositions ContactSequence::feet_at(int stance_change) const {
  FootPositions p;
  for (int i = 0; i < kNumLegs; ++i) p[i] = at(stance_change, i);
  return p;
}

int ContactSequence::first_touchdown(int leg) const {
  for (std::size_t k = 1; k < entries.size(); ++k) {
    if (entries[k][static_cast<std::size_t>(leg)].touchdown) return static_cast<int>(k);
  }
  return -1;
}

ContactSequence build_contact_sequence(const ContactSequenceInput& input,
                                       const ContactSchedule& schedule, const HeightMap& map,
                                       const GaitParams& gait, const FootholdConfig& config,
                                       const FootholdObserver& observer) {
  ContactSequence seq;
  seq.entries.resize(schedule.events.size());
  for (int i = 0; i < kNumLegs; ++i) {
    ContactEntry& e = seq.entries[0][i];
    e.position = input.current_feet[i];
    e.predicted = e.position;
  }

  const Mat3 yaw = rot_z(input.base.yaw);
  const Vec3 cmd(input.commanded_velocity.x(), input.commanded_velocity.y(), 0.0);
  const Vec3 step_length = yaw * cmd * gait.stance_time();
  const Vec3 velocity(input.base.velocity.x(), input.base.velocity.y(), 0.0);
  const double pad =
      inspection_border(config.edge_margin, map.resolution()) * map.resolution();

  for (std::size_t k = 1; k < schedule.events.size(); ++k) {
    seq.entries[k] = seq.entries[k - 1];
    for (auto& e : seq.entries[k]) e.touchdown = false;
    const StanceChange& ev = schedule.events[k];
    if (!ev.touchdown) continue;

    const int leg = ev.leg;
    const Vec3 hip_offset = yaw * Vec3(input.nominal_stance[leg].x(), input.nominal_stance[leg].y(), 0.0);
    const Vec3 center = Vec3(input.base.position.x(), input.base.position.y(), 0.0) + hip_offset;
    const FootholdPrediction pred = predict_foothold(leg, center, step_length, ev.dt, velocity);

    const Vec2 pred_xy = pred.position.head<2>();
    const HeightMap window = crop(map, pred_xy, config.crop_half_extent + pad);
    SwingGeometry swing{seq.entries[k - 1][leg].position, config.swing_apex_height};
    const Vec2 hip_at_touchdown = (center + ev.dt * velocity).head<2>();

    FootholdChoice choice;
    try {
      choice = evaluate_foothold(window, window.cell_of(pred_xy), swing, config,
                                 ReachLimit{hip_at_touchdown, config.reach_radius});
    } catch (const NoSafeFoothold&) {
      throw NoSafeFoothold("no safe foothold for leg " + std::string(leg_name(leg)) +
                               " at stance change " + std::to_string(k),
                           leg, static_cast<int>(k));
    }

    if (observer) observer(static_cast<int>(k), leg, window, choice);
    ContactEntry& e = seq.entries[k][leg];
    e.position = choice.position;
    e.predicted = Vec3(pred_xy.x(), pred_xy.y(), map.height_at(pred_xy).value_or(choice.position.z()));
    e.adjustment = choice.adjustment;
    e.score = choice.cost;
    e.touchdown = true;
  }
  return seq;
}

}  // namespace legmpc
