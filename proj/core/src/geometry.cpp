#include "wmkit/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace wmkit {

namespace {

constexpr double kDegenerateBand = 1e-9;  // closed-set band for thin polygons

double dist_point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

}  // namespace

SupportPolygon convex_hull(std::vector<Vec2> points) {
  std::sort(points.begin(), points.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  points.erase(std::unique(points.begin(), points.end(),
                           [](const Vec2& a, const Vec2& b) {
                             return a.x == b.x && a.y == b.y;
                           }),
               points.end());
  const int n = static_cast<int>(points.size());
  if (n <= 2) return {points};

  // Andrew's monotone chain; strict turns prune collinear points.
  std::vector<Vec2> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 &&
           (hull[k - 1] - hull[k - 2]).cross(points[i] - hull[k - 2]) <= 0.0)
      --k;
    hull[k++] = points[i];
  }
  const int lower = k + 1;
  for (int i = n - 2; i >= 0; --i) {
    while (k >= lower &&
           (hull[k - 1] - hull[k - 2]).cross(points[i] - hull[k - 2]) <= 0.0)
      --k;
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  if (hull.size() == 2 && hull[0].x == hull[1].x && hull[0].y == hull[1].y)
    hull.pop_back();
  return {hull};
}

bool point_in_polygon(const Vec2& p, const SupportPolygon& poly) {
  const auto& v = poly.vertices;
  if (v.empty()) return false;
  if (v.size() == 1) return (p - v[0]).norm() <= kDegenerateBand;
  if (v.size() == 2) return dist_point_segment(p, v[0], v[1]) <= kDegenerateBand;
  const int n = static_cast<int>(v.size());
  for (int i = 0; i < n; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % n];
    if ((b - a).cross(p - a) < -1e-12) return false;
  }
  return true;
}

double signed_distance(const TerrainScene& scene, const Vec3& p) {
  double best = p.z - scene.ground_height;
  for (const Box& box : scene.boxes) {
    // Rotate into the box frame (yaw about z only).
    const double c = std::cos(-box.yaw), s = std::sin(-box.yaw);
    const Vec3 r = p - box.center;
    const Vec3 local{c * r.x - s * r.y, s * r.x + c * r.y, r.z};
    const Vec3 q{std::abs(local.x) - box.half_extents.x,
                 std::abs(local.y) - box.half_extents.y,
                 std::abs(local.z) - box.half_extents.z};
    const Vec3 outside{std::max(q.x, 0.0), std::max(q.y, 0.0),
                       std::max(q.z, 0.0)};
    const double d =
        outside.norm() + std::min(std::max({q.x, q.y, q.z}), 0.0);
    best = std::min(best, d);
  }
  return best;
}

ContactSet detect_contacts(const KinematicTree& tree, const FkResult& fk,
                           const TerrainScene& scene, double eps) {
  ContactSet out;
  for (int j : tree.contact_point_indices) {
    if (signed_distance(scene, fk.world_positions[j]) <= eps)
      out.contacts.insert(j);
  }
  return out;
}

SupportPolygon support_polygon(const KinematicTree& tree, const FkResult& fk,
                               const TerrainScene& scene, double eps) {
  std::vector<Vec2> pts;
  for (int f : tree.feet_indices) {
    const Vec3& p = fk.world_positions[f];
    if (signed_distance(scene, p) <= eps) pts.push_back({p.x, p.y});
  }
  return convex_hull(std::move(pts));
}

std::array<double, kHeightMapSize> sample_height_map(const TerrainScene& scene,
                                                     const Vec3& base_position,
                                                     double base_yaw) {
  std::array<double, kHeightMapSize> heights{};
  const double c = std::cos(base_yaw), s = std::sin(base_yaw);
  for (int i = 0; i < kHeightMapRows; ++i) {
    const double fwd =
        -0.5 * kHeightMapSpan + (i + 0.5) * kHeightMapSpan / kHeightMapRows;
    for (int j = 0; j < kHeightMapCols; ++j) {
      const double lat =
          -0.5 * kHeightMapSpan + (j + 0.5) * kHeightMapSpan / kHeightMapCols;
      const Vec2 p{base_position.x + c * fwd - s * lat,
                   base_position.y + s * fwd + c * lat};
      double h = scene.ground_height;
      for (const Box& box : scene.boxes) {
        const double bc = std::cos(-box.yaw), bs = std::sin(-box.yaw);
        const double rx = p.x - box.center.x, ry = p.y - box.center.y;
        const double lx = bc * rx - bs * ry, ly = bs * rx + bc * ry;
        if (std::abs(lx) <= box.half_extents.x &&
            std::abs(ly) <= box.half_extents.y)
          h = std::max(h, box.top_height());
      }
      heights[i * kHeightMapCols + j] = h;
    }
  }
  return heights;
}

}  // namespace wmkit
