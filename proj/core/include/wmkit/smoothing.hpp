#pragma once

#include <vector>

#include "wmkit/motion.hpp"

namespace wmkit {

struct SmoothingConfig {
  int downsample_factor = 2;
  int ma_window = 5;      // causal moving-average window, frames
  int median_window = 5;  // centered median window, odd
};

/// Keeps every factor-th frame starting at 0; fps is divided by factor.
MotionSequence downsample(const MotionSequence& seq, int factor);

/// out[t] = mean(in[max(0, t-window+1) .. t]); window shrinks at the start.
std::vector<double> causal_moving_average(const std::vector<double>& channel,
                                          int window);

/// Centered sliding median with boundary replication; window must be odd.
std::vector<double> median_filter(const std::vector<double>& channel,
                                  int window);

/// Uniform resampling at target_fps over the same duration; joint channels
/// interpolate linearly, root orientation spherically.
MotionSequence interpolate_to_rate(const MotionSequence& seq,
                                   double target_fps);

/// downsample -> moving average -> median -> interpolate back. Output frame
/// count and fps equal the input's; velocities are re-differentiated.
MotionSequence smooth_pipeline(const MotionSequence& seq,
                               const SmoothingConfig& config);

}  // namespace wmkit
