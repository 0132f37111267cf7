#include "wmkit/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace wmkit {

bool KinematicTree::is_foot(int joint) const {
  return std::find(feet_indices.begin(), feet_indices.end(), joint) !=
         feet_indices.end();
}

Vec3 KinematicTree::resolved_com(int joint) const {
  if (joints[joint].com_local) return *joints[joint].com_local;
  Vec3 sum;
  int children = 0;
  for (int i = 0; i < joint_count(); ++i) {
    if (joints[i].parent == joint) {
      sum = sum + joints[i].local_offset;
      ++children;
    }
  }
  if (children == 0) return {};
  return sum * (0.5 / children);
}

void KinematicTree::validate() const {
  if (joints.empty()) throw std::invalid_argument("tree has no joints");
  if (joints[0].parent != -1)
    throw std::invalid_argument("joint 0 must be the root");
  double total_mass = 0.0;
  for (int i = 0; i < joint_count(); ++i) {
    const Joint& j = joints[i];
    if (i > 0 && (j.parent < 0 || j.parent >= i))
      throw std::invalid_argument("joint '" + j.name +
                                  "' breaks topological order");
    if (i == 0 && joint_count() > 1 && j.parent != -1)
      throw std::invalid_argument("multiple roots");
    if (j.mass < 0.0)
      throw std::invalid_argument("negative mass on joint '" + j.name + "'");
    total_mass += j.mass;
  }
  if (total_mass <= 0.0) throw std::invalid_argument("zero total mass");
  auto check_index = [&](int idx, const char* what) {
    if (idx < 0 || idx >= joint_count())
      throw std::invalid_argument(std::string(what) + " index out of range");
  };
  check_index(waist_index, "waist");
  for (int f : feet_indices) check_index(f, "foot");
  for (int c : contact_point_indices) check_index(c, "contact point");
}

FkResult forward_kinematics(const KinematicTree& tree, const Pose& pose) {
  if (static_cast<int>(pose.q.size()) != tree.actuated_count())
    throw std::invalid_argument("pose.q length does not match tree");
  FkResult fk;
  const int n = tree.joint_count();
  fk.world_positions.resize(n);
  fk.world_orientations.resize(n);
  fk.world_positions[0] = pose.root_position;
  fk.world_orientations[0] = pose.root_orientation;
  for (int i = 1; i < n; ++i) {
    const Joint& j = tree.joints[i];
    const Quat& parent_rot = fk.world_orientations[j.parent];
    fk.world_positions[i] =
        fk.world_positions[j.parent] + parent_rot.rotate(j.local_offset);
    fk.world_orientations[i] =
        (parent_rot * Quat::from_axis_angle(j.axis, pose.q[i - 1]))
            .normalized();
  }
  return fk;
}

Vec3 center_of_mass(const KinematicTree& tree, const FkResult& fk) {
  Vec3 weighted;
  double total = 0.0;
  for (int i = 0; i < tree.joint_count(); ++i) {
    const double m = tree.joints[i].mass;
    if (m == 0.0) continue;
    const Vec3 com_world = fk.world_positions[i] +
                           fk.world_orientations[i].rotate(tree.resolved_com(i));
    weighted = weighted + com_world * m;
    total += m;
  }
  if (total <= 0.0) throw std::invalid_argument("zero total mass");
  return weighted * (1.0 / total);
}

}  // namespace wmkit
