#pragma once

#include <string>
#include <vector>

#include "wmkit/kinematics.hpp"
#include "wmkit/motion.hpp"
#include "wmkit/rng.hpp"

namespace wmkit::test {

/// Random topologically ordered tree with unit-ish masses; joint 1 is the
/// waist, the last two joints are feet.
inline KinematicTree make_random_tree(Rng& rng, int joint_count) {
  KinematicTree tree;
  for (int i = 0; i < joint_count; ++i) {
    Joint j;
    j.name = "j" + std::to_string(i);
    j.parent = i == 0 ? -1 : static_cast<int>(rng.uniform_int(0, i - 1));
    j.local_offset = {rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2),
                      rng.uniform(-0.2, 0.2)};
    j.axis = Vec3{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}
                 .normalized();
    if (j.axis.norm() < 0.5) j.axis = {0, 0, 1};
    j.mass = rng.uniform(0.1, 2.0);
    if (rng.uniform() < 0.5)
      j.com_local = Vec3{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1),
                         rng.uniform(-0.1, 0.1)};
    tree.joints.push_back(std::move(j));
  }
  tree.waist_index = joint_count > 1 ? 1 : 0;
  if (joint_count > 3) {
    tree.feet_indices = {joint_count - 2, joint_count - 1};
  }
  for (int i = 1; i < joint_count; ++i) tree.contact_point_indices.push_back(i);
  return tree;
}

inline Pose make_random_pose(Rng& rng, int k) {
  Pose p;
  p.root_position = {rng.uniform(-1, 1), rng.uniform(-1, 1),
                     rng.uniform(-1, 1)};
  p.root_orientation =
      Quat::from_axis_angle({rng.uniform(-1, 1), rng.uniform(-1, 1),
                             rng.uniform(-1, 1)},
                            rng.uniform(-3, 3))
          .normalized();
  for (int i = 0; i < k; ++i) p.q.push_back(rng.uniform(-3, 3));
  return p;
}

}  // namespace wmkit::test
