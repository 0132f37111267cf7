#include "wmkit/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace wmkit {

namespace {

std::vector<std::vector<Vec3>> joint_positions(const KinematicTree& tree,
                                               const MotionSequence& seq) {
  std::vector<std::vector<Vec3>> out(seq.frame_count());
  for (int t = 0; t < seq.frame_count(); ++t)
    out[t] = forward_kinematics(tree, seq.frames[t]).world_positions;
  return out;
}

Vec3 central_diff(const std::vector<std::vector<Vec3>>& p, int t, int j,
                  double fps) {
  const int n = static_cast<int>(p.size());
  const int a = std::max(0, t - 1);
  const int b = std::min(n - 1, t + 1);
  if (a == b) return {};
  return (p[b][j] - p[a][j]) * (fps / (b - a));
}

}  // namespace

TrackingMetrics compute_metrics(const KinematicTree& tree,
                                const MotionSequence& result,
                                const MotionSequence& reference) {
  if (result.frame_count() != reference.frame_count() ||
      result.fps != reference.fps)
    throw std::invalid_argument("sequence length/fps mismatch");
  result.validate(tree.actuated_count());
  reference.validate(tree.actuated_count());

  const int n = result.frame_count();
  const int k = tree.actuated_count();
  const int joints = tree.joint_count();
  const auto pos_res = joint_positions(tree, result);
  const auto pos_ref = joint_positions(tree, reference);

  TrackingMetrics m;
  for (int t = 0; t < n; ++t) {
    double pe = 0.0, ve = 0.0, ae = 0.0;
    for (int j = 0; j < joints; ++j) {
      pe += (pos_res[t][j] - pos_ref[t][j]).norm();
      ve += (central_diff(pos_res, t, j, result.fps) -
             central_diff(pos_ref, t, j, reference.fps))
                .norm();
    }
    for (int i = 0; i < k; ++i)
      ae += std::abs(result.frames[t].q[i] - reference.frames[t].q[i]);
    m.mpjpe += pe / joints;
    m.mpjve += ve / joints;
    m.mpjae += ae / k;
    m.root_p +=
        (result.frames[t].root_position - reference.frames[t].root_position)
            .norm();
    m.root_r += result.frames[t].root_orientation.angle_to(
        reference.frames[t].root_orientation);
    const int a = std::max(0, t - 1), b = std::min(n - 1, t + 1);
    if (a != b) {
      const Vec3 vr = (result.frames[b].root_position -
                       result.frames[a].root_position) *
                      (result.fps / (b - a));
      const Vec3 vf = (reference.frames[b].root_position -
                       reference.frames[a].root_position) *
                      (reference.fps / (b - a));
      m.root_v += (vr - vf).norm();
    }
  }
  m.mpjpe /= n;
  m.mpjae /= n;
  m.mpjve /= n;
  m.root_p /= n;
  m.root_r /= n;
  m.root_v /= n;
  return m;
}

}  // namespace wmkit
