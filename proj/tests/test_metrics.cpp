#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"
#include "wmkit/metrics.hpp"

using namespace wmkit;

namespace {

MotionSequence random_motion(Rng& rng, int frames, int k) {
  MotionSequence seq;
  seq.fps = 50.0;
  for (int t = 0; t < frames; ++t)
    seq.frames.push_back(test::make_random_pose(rng, k));
  return seq;
}

}  // namespace

TEST_CASE("metrics: identical sequences score zero everywhere") {
  Rng rng(31);
  const KinematicTree tree = test::make_random_tree(rng, 6);
  const MotionSequence seq = random_motion(rng, 20, tree.actuated_count());
  const TrackingMetrics m = compute_metrics(tree, seq, seq);
  CHECK(m.mpjpe == 0.0);
  CHECK(m.mpjae == 0.0);
  CHECK(m.mpjve == 0.0);
  CHECK(m.root_p == 0.0);
  CHECK(m.root_r == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(m.root_v == 0.0);
}

TEST_CASE("metrics: constant root shift moves every joint by the same amount") {
  Rng rng(32);
  const KinematicTree tree = test::make_random_tree(rng, 6);
  const MotionSequence ref = random_motion(rng, 20, tree.actuated_count());
  MotionSequence res = ref;
  for (Pose& p : res.frames) p.root_position = p.root_position + Vec3{0.1, 0, 0};
  const TrackingMetrics m = compute_metrics(tree, res, ref);
  CHECK(m.root_p == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(m.mpjpe == doctest::Approx(0.1).epsilon(1e-12));
  // A time-constant shift leaves every velocity untouched.
  CHECK(m.mpjve == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.root_v == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.mpjae == 0.0);
}

TEST_CASE("metrics: root rotation is the geodesic angle") {
  Rng rng(33);
  const KinematicTree tree = test::make_random_tree(rng, 4);
  MotionSequence ref = random_motion(rng, 5, tree.actuated_count());
  for (Pose& p : ref.frames) p.root_orientation = Quat::identity();
  MotionSequence res = ref;
  for (Pose& p : res.frames)
    p.root_orientation = Quat::from_axis_angle({0, 0, 1}, 0.3);
  CHECK(compute_metrics(tree, res, ref).root_r ==
        doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("metrics: frame-averaged oracle on random sequences") {
  Rng rng(34);
  for (int trial = 0; trial < 5; ++trial) {
    const KinematicTree tree = test::make_random_tree(rng, 7);
    const int k = tree.actuated_count();
    const int n = 12;
    const MotionSequence res = random_motion(rng, n, k);
    const MotionSequence ref = random_motion(rng, n, k);

    std::vector<std::vector<Vec3>> pr(n), pf(n);
    for (int t = 0; t < n; ++t) {
      pr[t] = forward_kinematics(tree, res.frames[t]).world_positions;
      pf[t] = forward_kinematics(tree, ref.frames[t]).world_positions;
    }
    auto vel = [&](const std::vector<std::vector<Vec3>>& p, int t, int j) {
      const int a = std::max(0, t - 1), b = std::min(n - 1, t + 1);
      return (p[b][j] - p[a][j]) * (50.0 / (b - a));
    };
    TrackingMetrics want;
    for (int t = 0; t < n; ++t) {
      double pe = 0, ve = 0, ae = 0;
      for (int j = 0; j < tree.joint_count(); ++j) {
        pe += (pr[t][j] - pf[t][j]).norm();
        ve += (vel(pr, t, j) - vel(pf, t, j)).norm();
      }
      for (int i = 0; i < k; ++i)
        ae += std::abs(res.frames[t].q[i] - ref.frames[t].q[i]);
      want.mpjpe += pe / tree.joint_count() / n;
      want.mpjve += ve / tree.joint_count() / n;
      want.mpjae += ae / k / n;
      want.root_p +=
          (res.frames[t].root_position - ref.frames[t].root_position).norm() /
          n;
      want.root_r += res.frames[t].root_orientation.angle_to(
                         ref.frames[t].root_orientation) /
                     n;
      const int a = std::max(0, t - 1), b = std::min(n - 1, t + 1);
      want.root_v += ((res.frames[b].root_position -
                       res.frames[a].root_position) *
                          (50.0 / (b - a)) -
                      (ref.frames[b].root_position -
                       ref.frames[a].root_position) *
                          (50.0 / (b - a)))
                         .norm() /
                     n;
    }
    const TrackingMetrics got = compute_metrics(tree, res, ref);
    CHECK(got.mpjpe == doctest::Approx(want.mpjpe).epsilon(1e-12));
    CHECK(got.mpjae == doctest::Approx(want.mpjae).epsilon(1e-12));
    CHECK(got.mpjve == doctest::Approx(want.mpjve).epsilon(1e-12));
    CHECK(got.root_p == doctest::Approx(want.root_p).epsilon(1e-12));
    CHECK(got.root_r == doctest::Approx(want.root_r).epsilon(1e-12));
    CHECK(got.root_v == doctest::Approx(want.root_v).epsilon(1e-12));
  }
}

TEST_CASE("metrics: input checks") {
  Rng rng(35);
  const KinematicTree tree = test::make_random_tree(rng, 5);
  const MotionSequence a = random_motion(rng, 10, tree.actuated_count());
  MotionSequence b = a;
  b.frames.pop_back();
  CHECK_THROWS_AS(compute_metrics(tree, a, b), std::invalid_argument);
  b = a;
  b.fps = 60.0;
  CHECK_THROWS_AS(compute_metrics(tree, a, b), std::invalid_argument);
  b = a;
  b.frames[0].q.pop_back();
  CHECK_THROWS_AS(compute_metrics(tree, b, a), std::invalid_argument);
}
