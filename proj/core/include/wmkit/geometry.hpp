#pragma once

#include <array>
#include <set>
#include <vector>

#include "wmkit/kinematics.hpp"
#include "wmkit/math.hpp"

namespace wmkit {

/// Axis-aligned-in-z box, free yaw about the vertical axis.
struct Box {
  Vec3 center;
  Vec3 half_extents{0.1, 0.1, 0.1};  // componentwise > 0
  double yaw = 0.0;

  double top_height() const { return center.z + half_extents.z; }
};

struct TerrainScene {
  double ground_height = 0.0;
  std::vector<Box> boxes;
};

/// Environment contact set C(t): joint indices touching the scene.
struct ContactSet {
  std::set<int> contacts;

  bool empty() const { return contacts.empty(); }
  bool contains(int j) const { return contacts.count(j) != 0; }
};

/// Convex polygon in CCW order; may degenerate to a segment, a point, or
/// nothing.
struct SupportPolygon {
  std::vector<Vec2> vertices;

  bool empty() const { return vertices.empty(); }
};

SupportPolygon convex_hull(std::vector<Vec2> points);

/// Closed containment: boundary points count as inside. Degenerate polygons
/// use a 1e-9 m distance band.
bool point_in_polygon(const Vec2& p, const SupportPolygon& poly);

/// Signed distance from a point to the nearest support surface (ground plane
/// or any box). Negative inside a box.
double signed_distance(const TerrainScene& scene, const Vec3& p);

ContactSet detect_contacts(const KinematicTree& tree, const FkResult& fk,
                           const TerrainScene& scene, double eps);

/// Hull of ground projections of feet within eps of a support surface.
SupportPolygon support_polygon(const KinematicTree& tree, const FkResult& fk,
                               const TerrainScene& scene, double eps);

constexpr int kHeightMapRows = 8;  // along the base's forward (x) axis
constexpr int kHeightMapCols = 4;  // lateral
constexpr int kHeightMapSize = kHeightMapRows * kHeightMapCols;
constexpr double kHeightMapSpan = 0.5;  // meters, both directions

/// Tallest surface height under each cell center of an 8x4 grid spanning
/// 0.5x0.5 m, centered on the base's ground projection and rotated by
/// base_yaw. Row-major, rows along the forward axis.
std::array<double, kHeightMapSize> sample_height_map(const TerrainScene& scene,
                                                     const Vec3& base_position,
                                                     double base_yaw);

}  // namespace wmkit
