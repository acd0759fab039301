#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "legmpc/types.hpp"

namespace legmpc {

class TerrainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CellIndex {
  int row = 0;  // along world y
  int col = 0;  // along world x
  bool operator==(const CellIndex&) const = default;
};

/// Regular elevation grid. Cells are addressed by (row, col) with row along y
/// and col along x; storage is row-major. Unknown cells carry a flag and no
/// meaningful height.
///
/// Crops share the grid anchor of their source, so a point maps to the same
/// physical cell in both (see cell_of).
class HeightMap {
 public:
  HeightMap() = default;

  /// Builds a map whose cell (0, 0) has its lower corner at `origin`.
  /// `elevations` is row-major, `known` marks observed cells (empty = all known).
  HeightMap(Vec2 origin, double resolution, int width, int height,
            std::vector<double> elevations, std::vector<bool> known = {});

  static HeightMap flat(Vec2 origin, double resolution, int width, int height, double z = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  /// World position of the lower corner of cell (0, 0).
  Vec2 origin() const;

  bool in_bounds(const CellIndex& c) const {
    return c.row >= 0 && c.col >= 0 && c.row < height_ && c.col < width_;
  }
  /// floor((p - origin) / resolution); may be out of bounds.
  CellIndex cell_of(const Vec2& p) const;
  Vec2 cell_center(const CellIndex& c) const;

  bool known(const CellIndex& c) const { return known_[flat_index(c)]; }
  double at(const CellIndex& c) const { return elevations_[flat_index(c)]; }

  /// Height of the cell containing p, or nullopt when out of bounds or unknown.
  std::optional<double> height_at(const Vec2& p) const;

  std::size_t flat_index(const CellIndex& c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(c.col);
  }

  const std::vector<double>& elevations() const { return elevations_; }

 private:
  friend HeightMap crop(const HeightMap& map, const Vec2& center, double half_extent);

  Vec2 anchor_ = Vec2::Zero();
  int offset_row_ = 0;
  int offset_col_ = 0;
  double resolution_ = 1.0;
  int width_ = 0;
  int height_ = 0;
  std::vector<double> elevations_;
  std::vector<bool> known_;
};

/// Parses the JSON terrain description (schema in README). Throws TerrainError.
HeightMap parse_heightmap(const std::string& text);
HeightMap load_heightmap(const std::filesystem::path& path);

/// Square sub-grid of (2k+1)^2 cells, k = round(half_extent / resolution),
/// centered on the cell containing `center`. Cells outside the source are unknown.
HeightMap crop(const HeightMap& map, const Vec2& center, double half_extent);

struct TerrainPlane {
  Vec3 normal = Vec3::UnitZ();  // unit, normal.z() > 0
  Vec3 centroid = Vec3::Zero();
  double rms_residual = 0.0;
};

/// Least-squares plane through the points (centroid + smallest principal
/// direction of the scatter). Throws TerrainError for fewer than three or
/// collinear points.
TerrainPlane fit_plane(std::span<const Vec3> points);

}  // namespace legmpc
