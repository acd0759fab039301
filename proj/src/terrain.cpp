#include "legmpc/terrain.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace legmpc {

using nlohmann::json;

HeightMap::HeightMap(Vec2 origin, double resolution, int width, int height,
                     std::vector<double> elevations, std::vector<bool> known)
    : anchor_(origin),
      resolution_(resolution),
      width_(width),
      height_(height),
      elevations_(std::move(elevations)),
      known_(std::move(known)) {
  if (!(resolution_ > 0.0)) throw TerrainError("resolution must be positive");
  if (width_ < 1 || height_ < 1) throw TerrainError("width and height must be >= 1");
  const auto n = static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  if (elevations_.size() != n) {
    throw TerrainError("elevations has " + std::to_string(elevations_.size()) +
                       " entries, expected " + std::to_string(n));
  }
  if (known_.empty()) known_.assign(n, true);
  if (known_.size() != n) throw TerrainError("known-mask length mismatch");
}

HeightMap HeightMap::flat(Vec2 origin, double resolution, int width, int height, double z) {
  return HeightMap(origin, resolution, width, height,
                   std::vector<double>(static_cast<std::size_t>(width) * height, z));
}

Vec2 HeightMap::origin() const {
  return anchor_ + resolution_ * Vec2(offset_col_, offset_row_);
}

CellIndex HeightMap::cell_of(const Vec2& p) const {
  const Vec2 rel = (p - anchor_) / resolution_;
  return {static_cast<int>(std::floor(rel.y())) - offset_row_,
          static_cast<int>(std::floor(rel.x())) - offset_col_};
}

Vec2 HeightMap::cell_center(const CellIndex& c) const {
  return anchor_ + resolution_ * Vec2(c.col + offset_col_ + 0.5, c.row + offset_row_ + 0.5);
}

std::optional<double> HeightMap::height_at(const Vec2& p) const {
  const CellIndex c = cell_of(p);
  if (!in_bounds(c) || !known(c)) return std::nullopt;
  return at(c);
}

HeightMap crop(const HeightMap& map, const Vec2& center, double half_extent) {
  if (!(half_extent > 0.0)) throw TerrainError("crop half extent must be positive");
  const int k = static_cast<int>(std::lround(half_extent / map.resolution()));
  const int side = 2 * k + 1;
  const CellIndex c = map.cell_of(center);

  std::vector<double> z(static_cast<std::size_t>(side) * side, 0.0);
  std::vector<bool> known(z.size(), false);
  for (int r = 0; r < side; ++r) {
    for (int q = 0; q < side; ++q) {
      const CellIndex src{c.row - k + r, c.col - k + q};
      if (map.in_bounds(src) && map.known(src)) {
        const auto i = static_cast<std::size_t>(r) * side + q;
        z[i] = map.at(src);
        known[i] = true;
      }
    }
  }
  HeightMap out(map.anchor_, map.resolution(), side, side, std::move(z), std::move(known));
  out.offset_row_ = map.offset_row_ + c.row - k;
  out.offset_col_ = map.offset_col_ + c.col - k;
  return out;
}

namespace {

Vec2 read_vec2(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) {
    throw TerrainError(std::string(what) + " must be a 2-element array");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

HeightMap parse_heightmap(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw TerrainError(std::string("terrain parse error: ") + e.what());
  }
  try {
    const Vec2 origin = read_vec2(doc.at("origin"), "origin");
    const double res = doc.at("resolution").get<double>();
    const int width = doc.at("width").get<int>();
    const int height = doc.at("height").get<int>();
    if (!(res > 0.0)) throw TerrainError("resolution must be positive");
    if (width < 1 || height < 1) throw TerrainError("width and height must be >= 1");
    const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);

    std::vector<double> z(n, 0.0);
    std::vector<bool> known(n, true);

    if (doc.contains("elevations")) {
      const json& e = doc["elevations"];
      if (!e.is_array() || e.size() != n) {
        throw TerrainError("elevations must list width*height = " + std::to_string(n) +
                           " values");
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (e[i].is_null()) {
          known[i] = false;
        } else {
          z[i] = e[i].get<double>();
        }
      }
    } else {
      const double base = doc.value("base_height", 0.0);
      std::fill(z.begin(), z.end(), base);
      // Boxes are rasterized in order; a cell takes the height of the last
      // box that contains its center.
      const HeightMap grid = HeightMap::flat(origin, res, width, height);
      auto rasterize = [&](const json& box, bool unknown) {
        const Vec2 lo = read_vec2(box.at("min"), "box.min");
        const Vec2 hi = read_vec2(box.at("max"), "box.max");
        const double h = unknown ? 0.0 : box.at("height").get<double>();
        for (int r = 0; r < height; ++r) {
          for (int c = 0; c < width; ++c) {
            const Vec2 p = grid.cell_center({r, c});
            if (p.x() >= lo.x() && p.x() < hi.x() && p.y() >= lo.y() && p.y() < hi.y()) {
              const auto i = grid.flat_index({r, c});
              if (unknown) {
                known[i] = false;
              } else {
                z[i] = h;
                known[i] = true;
              }
            }
          }
        }
      };
      for (const json& box : doc.value("boxes", json::array())) rasterize(box, false);
      for (const json& box : doc.value("unknown", json::array())) rasterize(box, true);
    }
    return HeightMap(origin, res, width, height, std::move(z), std::move(known));
  } catch (const json::exception& e) {
    throw TerrainError(std::string("terrain schema error: ") + e.what());
  }
}

HeightMap load_heightmap(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TerrainError("cannot open terrain file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_heightmap(ss.str());
}

TerrainPlane fit_plane(std::span<const Vec3> points) {
  if (points.size() < 3) throw TerrainError("plane fit needs at least three points");
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());

  Mat3 scatter = Mat3::Zero();
  for (const Vec3& p : points) {
    const Vec3 d = p - centroid;
    scatter += d * d.transpose();
  }

  Eigen::SelfAdjointEigenSolver<Mat3> eig;
  eig.computeDirect(scatter);
  const Vec3 lambda = eig.eigenvalues();  // ascending
  const double scale = std::max(lambda(2), 1e-300);
  if (lambda(1) <= 1e-12 * scale || lambda(2) <= 0.0) {
    throw TerrainError("plane fit points are collinear or coincident");
  }

  Vec3 normal = eig.eigenvectors().col(0).normalized();
  if (normal.z() < 0.0) normal = -normal;
  if (normal.z() <= 1e-12) throw TerrainError("fitted plane is vertical");

  double sq = 0.0;
  for (const Vec3& p : points) {
    const double d = normal.dot(p - centroid);
    sq += d * d;
  }
  return {normal, centroid, std::sqrt(sq / static_cast<double>(points.size()))};
}

}  // namespace legmpc
