#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wmkit/math.hpp"

namespace wmkit {

struct Joint {
  std::string name;
  int parent = -1;              // -1 only for the root
  Vec3 local_offset;            // meters, in parent frame
  Vec3 axis{0, 0, 1};           // unit rotation axis, joint frame
  double mass = 0.0;            // kg, link carried by this joint
  std::optional<Vec3> com_local;  // link CoM in joint frame; see resolved_com
};

/// Joint hierarchy in topological order (parents precede children).
/// Index 0 is the floating root; indices 1..K are the actuated joints, and
/// actuated joint i maps to configuration slot i-1.
struct KinematicTree {
  std::vector<Joint> joints;
  int waist_index = 0;
  std::vector<int> feet_indices;
  std::vector<int> contact_point_indices;

  int joint_count() const { return static_cast<int>(joints.size()); }
  int actuated_count() const { return joint_count() - 1; }

  bool is_foot(int joint) const;

  /// com_local if given, else midpoint of the mean child offset (zero for
  /// leaves).
  Vec3 resolved_com(int joint) const;

  /// Throws std::invalid_argument on a malformed tree (bad topology, bad
  /// indices, negative or all-zero masses).
  void validate() const;
};

struct Pose {
  Vec3 root_position;
  Quat root_orientation = Quat::identity();
  std::vector<double> q;  // length K, radians
};

struct FkResult {
  std::vector<Vec3> world_positions;
  std::vector<Quat> world_orientations;
};

FkResult forward_kinematics(const KinematicTree& tree, const Pose& pose);

/// Mass-weighted mean of per-link world CoM points.
Vec3 center_of_mass(const KinematicTree& tree, const FkResult& fk);

/// Ground-plane projection P(t): drops the vertical coordinate.
inline Vec2 gravity_projection(const Vec3& com) { return {com.x, com.y}; }

}  // namespace wmkit
