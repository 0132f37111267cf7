#pragma once

#include "wmkit/motion.hpp"

namespace wmkit {

struct TrackingMetrics {
  double mpjpe = 0.0;   // m, mean per-joint global position error
  double mpjae = 0.0;   // rad, mean per-joint angle error
  double mpjve = 0.0;   // m/s, mean per-joint velocity error
  double root_p = 0.0;  // m
  double root_r = 0.0;  // rad, geodesic
  double root_v = 0.0;  // m/s
};

/// Frame-averaged tracking errors of result against reference; joint
/// positions come from forward kinematics, velocities from central
/// differences.
TrackingMetrics compute_metrics(const KinematicTree& tree,
                                const MotionSequence& result,
                                const MotionSequence& reference);

}  // namespace wmkit
