#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "wmkit/geometry.hpp"
#include "wmkit/motion.hpp"
#include "wmkit/rng.hpp"

namespace wmkit {

/// Half-open frame range [begin, end).
struct FrameRange {
  int begin = 0;
  int end = 0;

  bool operator==(const FrameRange&) const = default;
  int length() const { return end - begin; }
};

struct LabelParams {
  double contact_eps = 0.02;   // meters
  int delta_t = 20;            // frames, interval perturbation span
  bool feet_in_interval_test = false;  // count feet contacts toward C(t) != {}
};

/// Per-frame weightlessness annotation. labels[t] has one {0,1} entry per
/// actuated joint (1 = weightless); active_sets[t] holds the tree joint
/// indices of A(t) inside intervals, empty outside.
struct WeightlessAnnotation {
  std::vector<FrameRange> intervals;
  std::vector<std::vector<std::uint8_t>> labels;
  std::vector<std::set<int>> active_sets;
  std::uint64_t seed = 0;
  LabelParams params;
};

/// Maximal runs of frames where the CoM projection leaves the support polygon
/// while an environment contact exists.
std::vector<FrameRange> weightless_interval(const MotionSequence& seq,
                                            const KinematicTree& tree,
                                            const TerrainScene& scene,
                                            double eps,
                                            bool feet_in_interval_test = false);

/// Shifts each range's endpoints by independent uniform draws in
/// [-delta_t, delta_t], clamps to [0, frame_count), drops inverted ranges and
/// merges overlaps.
std::vector<FrameRange> perturb_interval(const std::vector<FrameRange>& ranges,
                                         int delta_t, int frame_count,
                                         Rng& rng);

/// A(t) = {waist} U union of ParentPath(c): each contact joint and its
/// ancestor chain up to the waist.
std::set<int> active_joints(const KinematicTree& tree,
                            const ContactSet& contacts);

WeightlessAnnotation annotate_sequence(const MotionSequence& seq,
                                       const KinematicTree& tree,
                                       const TerrainScene& scene,
                                       const LabelParams& params,
                                       std::uint64_t seed);

}  // namespace wmkit
