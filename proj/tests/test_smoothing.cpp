#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "wmkit/smoothing.hpp"

using namespace wmkit;

namespace {

MotionSequence make_ramp(int n, double slope, int k = 3, double fps = 50.0) {
  MotionSequence seq;
  seq.fps = fps;
  for (int t = 0; t < n; ++t) {
    Pose p;
    p.root_position = {slope * t, -slope * t, 1.0};
    for (int i = 0; i < k; ++i) p.q.push_back(slope * t * (i + 1));
    seq.frames.push_back(p);
  }
  return seq;
}

}  // namespace

TEST_CASE("downsample: stride, fps, errors") {
  const MotionSequence seq = make_ramp(10, 1.0);
  const MotionSequence half = downsample(seq, 2);
  CHECK(half.frame_count() == 5);
  CHECK(half.fps == 25.0);
  for (int t = 0; t < 5; ++t)
    CHECK(half.frames[t].q[0] == seq.frames[2 * t].q[0]);
  CHECK(downsample(seq, 1).frame_count() == 10);
  CHECK(downsample(seq, 3).frame_count() == 4);  // frames 0,3,6,9
  CHECK_THROWS_AS(downsample(seq, 0), std::invalid_argument);
}

TEST_CASE("moving average: impulse response and shrinking head window") {
  const auto out = causal_moving_average({0, 0, 1, 0, 0}, 3);
  REQUIRE(out.size() == 5);
  CHECK(out[0] == 0.0);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(out[3] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(out[4] == doctest::Approx(1.0 / 3).epsilon(1e-12));

  const auto head = causal_moving_average({6, 2, 4}, 5);
  CHECK(head[0] == 6.0);
  CHECK(head[1] == 4.0);                                  // (6+2)/2
  CHECK(head[2] == doctest::Approx(4.0).epsilon(1e-12));  // (6+2+4)/3
  CHECK_THROWS_AS(causal_moving_average({1.0}, 0), std::invalid_argument);
}

TEST_CASE("moving average: matches brute-force window means and is causal") {
  Rng rng(11);
  std::vector<double> ch(64);
  for (double& v : ch) v = rng.uniform(-5, 5);
  for (int window : {1, 2, 5, 9}) {
    const auto out = causal_moving_average(ch, window);
    for (int t = 0; t < 64; ++t) {
      double sum = 0.0;
      const int lo = std::max(0, t - window + 1);
      for (int s = lo; s <= t; ++s) sum += ch[s];
      CHECK(out[t] == doctest::Approx(sum / (t - lo + 1)).epsilon(1e-12));
    }
    // Causality: future samples don't affect the past.
    std::vector<double> tampered = ch;
    for (int s = 32; s < 64; ++s) tampered[s] += 100.0;
    const auto out2 = causal_moving_average(tampered, window);
    for (int t = 0; t < 32; ++t) CHECK(out2[t] == out[t]);
  }
}

TEST_CASE("median filter: spike removal and boundary replication") {
  CHECK(median_filter({0, 0, 10, 0, 0}, 3) ==
        std::vector<double>{0, 0, 0, 0, 0});
  const auto edge = median_filter({5, 0, 0, 0}, 3);
  CHECK(edge[0] == 5.0);  // window {5, 5, 0} under replication
  CHECK(edge[1] == 0.0);
  CHECK_THROWS_AS(median_filter({1.0, 2.0}, 4), std::invalid_argument);
  CHECK_THROWS_AS(median_filter({1.0, 2.0}, 0), std::invalid_argument);
}

TEST_CASE("median filter: matches a sort-based oracle") {
  Rng rng(12);
  std::vector<double> ch(50);
  for (double& v : ch) v = rng.uniform(-3, 3);
  for (int window : {1, 3, 5, 7}) {
    const auto out = median_filter(ch, window);
    const int half = window / 2;
    for (int t = 0; t < 50; ++t) {
      std::vector<double> buf;
      for (int k = -half; k <= half; ++k)
        buf.push_back(ch[std::clamp(t + k, 0, 49)]);
      std::sort(buf.begin(), buf.end());
      CHECK(out[t] == buf[half]);
    }
  }
}

TEST_CASE("interpolate_to_rate: frame count and linearity") {
  const MotionSequence seq = make_ramp(11, 0.5, 2, 10.0);  // 1 s
  const MotionSequence up = interpolate_to_rate(seq, 20.0);
  CHECK(up.fps == 20.0);
  CHECK(up.frame_count() == 21);
  for (int t = 0; t < 21; ++t)
    CHECK(up.frames[t].q[0] == doctest::Approx(0.25 * t).epsilon(1e-12));
  CHECK_THROWS_AS(interpolate_to_rate(seq, 0.0), std::invalid_argument);
}

TEST_CASE("interpolate_to_rate: orientations slerp along the arc") {
  MotionSequence seq;
  seq.fps = 1.0;
  for (int t = 0; t < 2; ++t) {
    Pose p;
    p.root_orientation = Quat::from_yaw(t * M_PI / 2);
    seq.frames.push_back(p);
  }
  const MotionSequence up = interpolate_to_rate(seq, 2.0);
  REQUIRE(up.frame_count() == 3);
  CHECK(up.frames[1].root_orientation.yaw() ==
        doctest::Approx(M_PI / 4).epsilon(1e-12));
}

TEST_CASE("pipeline: constants are fixed points") {
  MotionSequence seq;
  seq.fps = 50.0;
  for (int t = 0; t < 60; ++t) {
    Pose p;
    p.root_position = {0.3, -0.2, 0.9};
    p.root_orientation = Quat::from_yaw(1.1);
    p.q = {0.5, -1.2, 0.0};
    seq.frames.push_back(p);
  }
  const MotionSequence out = smooth_pipeline(seq, {});
  REQUIRE(out.frame_count() == 60);
  CHECK(out.fps == 50.0);
  for (int t = 0; t < 60; ++t) {
    for (int i = 0; i < 3; ++i)
      CHECK(out.frames[t].q[i] ==
            doctest::Approx(seq.frames[t].q[i]).epsilon(1e-12));
    CHECK(out.frames[t].root_position.z == doctest::Approx(0.9));
    CHECK(out.frames[t].root_orientation.yaw() == doctest::Approx(1.1));
    for (double v : out.joint_velocities[t])
      CHECK(std::abs(v) < 1e-9);
  }
}

TEST_CASE("pipeline: identity config reproduces the input") {
  Rng rng(33);
  MotionSequence seq;
  seq.fps = 50.0;
  for (int t = 0; t < 25; ++t) {
    Pose p = wmkit::test::make_random_pose(rng, 4);
    seq.frames.push_back(p);
  }
  SmoothingConfig cfg;
  cfg.downsample_factor = 1;
  cfg.ma_window = 1;
  cfg.median_window = 1;
  const MotionSequence out = smooth_pipeline(seq, cfg);
  REQUIRE(out.frame_count() == 25);
  for (int t = 0; t < 25; ++t) {
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(out.frames[t].q[i] - seq.frames[t].q[i]) < 1e-12);
    CHECK(std::abs(out.frames[t].root_position.x -
                   seq.frames[t].root_position.x) < 1e-12);
    // Orientation equality up to quaternion sign.
    const Quat& a = out.frames[t].root_orientation;
    const Quat& b = seq.frames[t].root_orientation;
    const double d = std::abs(a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z);
    CHECK(d == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("pipeline: interior of a ramp keeps its slope with a fixed lag") {
  // Odd frame count so the downsampled grid spans the full duration and the
  // resample stage never clamps.
  const double c = 0.02;
  const MotionSequence seq = make_ramp(101, c, 1);
  const MotionSequence out = smooth_pipeline(seq, {});
  REQUIRE(out.frame_count() == 101);
  CHECK(out.fps == 50.0);
  // Causal 5-tap mean of a ramp lags by 2 samples in the downsampled (factor
  // 2) domain: out[t] = c*(t - 4) once filters are warmed up.
  for (int t = 16; t <= 100; ++t)
    CHECK(out.frames[t].q[0] == doctest::Approx(c * (t - 4)).epsilon(1e-9));
  // Velocities re-differentiated from the smoothed channels.
  for (int t = 20; t <= 96; ++t)
    CHECK(out.joint_velocities[t][0] ==
          doctest::Approx(c * 50.0).epsilon(1e-6));
}
