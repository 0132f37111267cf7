#pragma once

#include <stdexcept>
#include <vector>

#include "wmkit/kinematics.hpp"

namespace wmkit {

/// Timed sequence of poses at a fixed rate. Joint velocities are optional;
/// recompute_velocities derives them by central differences.
struct MotionSequence {
  double fps = 50.0;
  std::vector<Pose> frames;
  std::vector<std::vector<double>> joint_velocities;  // empty or per-frame K

  int frame_count() const { return static_cast<int>(frames.size()); }
  double duration() const {
    return frames.empty() ? 0.0 : (frame_count() - 1) / fps;
  }

  void validate(int expected_k) const {
    if (fps <= 0.0) throw std::invalid_argument("fps must be > 0");
    if (frames.empty()) throw std::invalid_argument("empty motion sequence");
    for (const Pose& p : frames)
      if (static_cast<int>(p.q.size()) != expected_k)
        throw std::invalid_argument("frame q length does not match tree");
    if (!joint_velocities.empty() &&
        joint_velocities.size() != frames.size())
      throw std::invalid_argument("velocity/frame count mismatch");
  }

  void recompute_velocities() {
    const int n = frame_count();
    if (n == 0) return;
    const int k = static_cast<int>(frames[0].q.size());
    joint_velocities.assign(n, std::vector<double>(k, 0.0));
    if (n < 2) return;
    for (int t = 0; t < n; ++t) {
      const int a = std::max(0, t - 1);
      const int b = std::min(n - 1, t + 1);
      const double dt = (b - a) / fps;
      for (int i = 0; i < k; ++i)
        joint_velocities[t][i] = (frames[b].q[i] - frames[a].q[i]) / dt;
    }
  }
};

}  // namespace wmkit
