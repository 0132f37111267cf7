#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"
#include "wmkit/autolabel.hpp"

using namespace wmkit;

namespace {

// Torso on two feet plus one reaching hand and a free arm. With the root at
// z = 1 the feet and the hand touch the ground; the CoM projection falls off
// the (degenerate) two-feet support segment, so hand-contact frames satisfy
// the relaxation predicate.
KinematicTree sitter_tree(double hand_drop = 1.0) {
  KinematicTree tree;
  tree.joints.push_back({"root", -1, {0, 0, 0}, {0, 0, 1}, 1.0, Vec3{}});
  tree.joints.push_back({"waist", 0, {0, 0, 0}, {0, 0, 1}, 1.0, Vec3{}});
  tree.joints.push_back(
      {"hand", 1, {0.3, 0, -hand_drop}, {0, 0, 1}, 0.1, Vec3{}});
  tree.joints.push_back(
      {"lfoot", 1, {0.05, 0.1, -1.0}, {0, 0, 1}, 0.1, Vec3{}});
  tree.joints.push_back(
      {"rfoot", 1, {0.05, -0.1, -1.0}, {0, 0, 1}, 0.1, Vec3{}});
  tree.joints.push_back({"arm", 1, {0, 0.5, 0}, {0, 0, 1}, 0.1, Vec3{}});
  tree.waist_index = 1;
  tree.feet_indices = {3, 4};
  tree.contact_point_indices = {2, 3, 4};
  tree.validate();
  return tree;
}

// 200 frames: airborne for [0,100), grounded (feet + hand contact) after.
MotionSequence sit_sequence(int touch_frame = 100, int total = 200) {
  MotionSequence seq;
  seq.fps = 50.0;
  for (int t = 0; t < total; ++t) {
    Pose p;
    p.root_position = {0, 0, t < touch_frame ? 1.5 : 1.0};
    p.q.assign(5, 0.0);
    seq.frames.push_back(p);
  }
  return seq;
}

}  // namespace

TEST_CASE("interval detection: hand-assisted sit yields [100, 200)") {
  const KinematicTree tree = sitter_tree();
  const MotionSequence seq = sit_sequence();
  const auto ranges = weightless_interval(seq, tree, {}, 0.02);
  REQUIRE(ranges.size() == 1);
  CHECK(ranges[0] == FrameRange{100, 200});
}

TEST_CASE("interval detection: feet-only contact does not count") {
  // Hand hangs at z = 0.5; only feet touch. The CoM projection is off the
  // two-feet segment, but without a non-foot contact no interval opens.
  const KinematicTree tree = sitter_tree(0.5);
  const MotionSequence seq = sit_sequence(0);
  CHECK(weightless_interval(seq, tree, {}, 0.02).empty());
  // Counting feet flips the whole sequence into one interval.
  const auto with_feet = weightless_interval(seq, tree, {}, 0.02, true);
  REQUIRE(with_feet.size() == 1);
  CHECK(with_feet[0] == FrameRange{0, 200});
}

TEST_CASE("interval detection: CoM inside support is not weightless") {
  // Four feet at the corners of a square around the CoM plus a hand contact
  // at the center: supported, so no interval despite the extra contact.
  KinematicTree tree;
  tree.joints.push_back({"root", -1, {0, 0, 0}, {0, 0, 1}, 1.0, Vec3{}});
  tree.joints.push_back({"waist", 0, {0, 0, 0}, {0, 0, 1}, 1.0, Vec3{}});
  tree.joints.push_back({"hand", 1, {0, 0, -1.0}, {0, 0, 1}, 0.1, Vec3{}});
  const double sx[4] = {0.2, -0.2, -0.2, 0.2};
  const double sy[4] = {0.2, 0.2, -0.2, -0.2};
  for (int i = 0; i < 4; ++i) {
    tree.joints.push_back({"f" + std::to_string(i), 1,
                           {sx[i], sy[i], -1.0}, {0, 0, 1}, 0.1, Vec3{}});
    tree.feet_indices.push_back(3 + i);
  }
  tree.waist_index = 1;
  tree.contact_point_indices = {2, 3, 4, 5, 6};
  tree.validate();

  MotionSequence seq;
  for (int t = 0; t < 50; ++t) {
    Pose p;
    p.root_position = {0, 0, 1.0};
    p.q.assign(6, 0.0);
    seq.frames.push_back(p);
  }
  CHECK(weightless_interval(seq, tree, {}, 0.02).empty());
}

TEST_CASE("perturb_interval: zero span is the identity") {
  Rng rng(1);
  const std::vector<FrameRange> in = {{10, 30}, {50, 80}};
  CHECK(perturb_interval(in, 0, 100, rng) == in);
}

TEST_CASE("perturb_interval: deterministic, clamped, sorted, merged") {
  const std::vector<FrameRange> in = {{5, 25}, {30, 55}, {70, 95}};
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    Rng a(seed), b(seed);
    const auto out = perturb_interval(in, 20, 100, a);
    CHECK(out == perturb_interval(in, 20, 100, b));
    for (size_t i = 0; i < out.size(); ++i) {
      CHECK(out[i].begin >= 0);
      CHECK(out[i].end <= 100);
      CHECK(out[i].begin < out[i].end);
      if (i > 0) CHECK(out[i].begin > out[i - 1].end);  // disjoint, sorted
    }
    // Endpoints never move more than delta_t before clamping.
    for (const FrameRange& r : out) {
      const bool near_some = std::any_of(
          in.begin(), in.end(), [&](const FrameRange& s) {
            return std::abs(r.begin - s.begin) <= 20 ||
                   r.begin == 0;
          });
      CHECK(near_some);
    }
  }
}

TEST_CASE("perturb_interval: inverted ranges are dropped") {
  // A 1-frame range with a huge span inverts often; the output must stay
  // well-formed regardless.
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto out = perturb_interval({{50, 51}}, 60, 100, rng);
    for (const FrameRange& r : out) CHECK(r.begin < r.end);
    CHECK(out.size() <= 1);
  }
}

TEST_CASE("active_joints: waist plus parent paths of all contacts") {
  const KinematicTree tree = sitter_tree();
  ContactSet c;
  c.contacts = {2, 3, 4};
  const std::set<int> a = active_joints(tree, c);
  CHECK(a == std::set<int>{1, 2, 3, 4});  // arm (5) stays out

  CHECK(active_joints(tree, {}) == std::set<int>{1});  // waist always active
  ContactSet bad;
  bad.contacts = {99};
  CHECK_THROWS_AS(active_joints(tree, bad), std::invalid_argument);
}

TEST_CASE("active_joints: random trees match an ancestor-chain oracle") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + static_cast<int>(rng.uniform_int(0, 16));
    const KinematicTree tree = wmkit::test::make_random_tree(rng, n);
    ContactSet contacts;
    for (int j = 1; j < n; ++j)
      if (rng.uniform() < 0.3) contacts.contacts.insert(j);

    // Oracle: precompute each joint's full root-ward ancestor chain, then
    // keep the prefix up to (and including) the waist.
    std::set<int> expected;
    if (tree.waist_index > 0) expected.insert(tree.waist_index);
    for (int c : contacts.contacts) {
      std::vector<int> chain;
      for (int j = c; j != -1; j = tree.joints[j].parent) chain.push_back(j);
      for (int j : chain) {
        if (j == 0) break;
        expected.insert(j);
        if (j == tree.waist_index) break;
      }
    }
    CHECK(active_joints(tree, contacts) == expected);
  }
}

TEST_CASE("annotate_sequence: labels, active sets, and the waist invariant") {
  const KinematicTree tree = sitter_tree();
  const MotionSequence seq = sit_sequence();
  LabelParams params;
  params.delta_t = 0;
  const WeightlessAnnotation ann = annotate_sequence(seq, tree, {}, params, 7);

  REQUIRE(ann.intervals.size() == 1);
  CHECK(ann.intervals[0] == FrameRange{100, 200});
  REQUIRE(ann.labels.size() == 200);
  for (int t = 0; t < 200; ++t) {
    REQUIRE(ann.labels[t].size() == 5);
    if (t < 100) {
      for (std::uint8_t v : ann.labels[t]) CHECK(v == 0);
      CHECK(ann.active_sets[t].empty());
    } else {
      // A(t) = {waist, hand, feet}; only the free arm relaxes.
      CHECK(ann.active_sets[t] == std::set<int>{1, 2, 3, 4});
      CHECK(ann.labels[t] ==
            std::vector<std::uint8_t>{0, 0, 0, 0, 1});
    }
  }
}

TEST_CASE("annotate_sequence: perturbed runs stay consistent across seeds") {
  const KinematicTree tree = sitter_tree();
  const MotionSequence seq = sit_sequence();
  LabelParams params;  // delta_t = 20
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    const WeightlessAnnotation ann =
        annotate_sequence(seq, tree, {}, params, seed);
    const WeightlessAnnotation again =
        annotate_sequence(seq, tree, {}, params, seed);
    CHECK(ann.intervals == again.intervals);
    CHECK(ann.labels == again.labels);

    REQUIRE(ann.intervals.size() == 1);
    const FrameRange r = ann.intervals[0];
    CHECK(r.begin >= 80);
    CHECK(r.begin <= 120);
    CHECK(r.end >= 180);
    CHECK(r.end <= 200);
    for (int t = 0; t < 200; ++t) {
      const bool inside = t >= r.begin && t < r.end;
      // The waist is never weightless.
      CHECK(ann.labels[t][tree.waist_index - 1] == 0);
      if (inside) {
        // Frames dragged in before touchdown borrow the nearest contact
        // frame's active set, so labels never collapse to all-weightless.
        CHECK_FALSE(ann.active_sets[t].empty());
        CHECK(ann.active_sets[t].count(tree.waist_index) == 1);
      } else {
        for (std::uint8_t v : ann.labels[t]) CHECK(v == 0);
      }
    }
  }
}
