#include "wmkit/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace wmkit {

namespace {

// Interpolates the sequence at time t (seconds from frame 0), clamped to the
// covered span.
Pose sample_at(const MotionSequence& seq, double t) {
  const int n = seq.frame_count();
  const double ft = std::clamp(t * seq.fps, 0.0, double(n - 1));
  const int lo = static_cast<int>(std::floor(ft));
  const int hi = std::min(lo + 1, n - 1);
  const double a = ft - lo;
  const Pose& p0 = seq.frames[lo];
  const Pose& p1 = seq.frames[hi];
  Pose out;
  out.root_position = p0.root_position * (1.0 - a) + p1.root_position * a;
  out.root_orientation = slerp(p0.root_orientation, p1.root_orientation, a);
  out.q.resize(p0.q.size());
  for (size_t i = 0; i < p0.q.size(); ++i)
    out.q[i] = (1.0 - a) * p0.q[i] + a * p1.q[i];
  return out;
}

std::vector<double> channel_of(const MotionSequence& seq,
                               const std::function<double(const Pose&)>& get) {
  std::vector<double> ch(seq.frame_count());
  for (int t = 0; t < seq.frame_count(); ++t) ch[t] = get(seq.frames[t]);
  return ch;
}

}  // namespace

MotionSequence downsample(const MotionSequence& seq, int factor) {
  if (factor < 1) throw std::invalid_argument("downsample factor must be >= 1");
  MotionSequence out;
  out.fps = seq.fps / factor;
  for (int t = 0; t < seq.frame_count(); t += factor)
    out.frames.push_back(seq.frames[t]);
  return out;
}

std::vector<double> causal_moving_average(const std::vector<double>& channel,
                                          int window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  std::vector<double> out(channel.size());
  double acc = 0.0;
  for (int t = 0; t < static_cast<int>(channel.size()); ++t) {
    acc += channel[t];
    if (t >= window) acc -= channel[t - window];
    out[t] = acc / std::min(t + 1, window);
  }
  return out;
}

std::vector<double> median_filter(const std::vector<double>& channel,
                                  int window) {
  if (window < 1 || window % 2 == 0)
    throw std::invalid_argument("median window must be odd and >= 1");
  const int n = static_cast<int>(channel.size());
  const int half = window / 2;
  std::vector<double> out(n);
  std::vector<double> buf(window);
  for (int t = 0; t < n; ++t) {
    for (int k = -half; k <= half; ++k)
      buf[k + half] = channel[std::clamp(t + k, 0, n - 1)];
    std::nth_element(buf.begin(), buf.begin() + half, buf.end());
    out[t] = buf[half];
  }
  return out;
}

MotionSequence interpolate_to_rate(const MotionSequence& seq,
                                   double target_fps) {
  if (target_fps <= 0.0) throw std::invalid_argument("target fps must be > 0");
  if (seq.frame_count() < 2) {
    if (seq.frame_count() == 1 && seq.fps == target_fps) return seq;
    throw std::invalid_argument("need >= 2 frames to interpolate");
  }
  MotionSequence out;
  out.fps = target_fps;
  const int n_out =
      static_cast<int>(std::lround(seq.duration() * target_fps)) + 1;
  for (int t = 0; t < n_out; ++t)
    out.frames.push_back(sample_at(seq, t / target_fps));
  return out;
}

MotionSequence smooth_pipeline(const MotionSequence& seq,
                               const SmoothingConfig& config) {
  MotionSequence work = downsample(seq, config.downsample_factor);
  const int k = work.frames.empty() ? 0 : int(work.frames[0].q.size());

  auto filter_channel = [&](auto get, auto set, bool run_median) {
    std::vector<double> ch = channel_of(work, get);
    ch = causal_moving_average(ch, config.ma_window);
    if (run_median) ch = median_filter(ch, config.median_window);
    for (int t = 0; t < work.frame_count(); ++t) set(work.frames[t], ch[t]);
  };

  for (int i = 0; i < k; ++i)
    filter_channel([i](const Pose& p) { return p.q[i]; },
                   [i](Pose& p, double v) { p.q[i] = v; }, true);
  filter_channel([](const Pose& p) { return p.root_position.x; },
                 [](Pose& p, double v) { p.root_position.x = v; }, true);
  filter_channel([](const Pose& p) { return p.root_position.y; },
                 [](Pose& p, double v) { p.root_position.y = v; }, true);
  filter_channel([](const Pose& p) { return p.root_position.z; },
                 [](Pose& p, double v) { p.root_position.z = v; }, true);

  // Quaternion channels: sign-align, filter the 4 components with the moving
  // average only (the median stage skips orientations), renormalize.
  for (int t = 1; t < work.frame_count(); ++t) {
    Quat& q = work.frames[t].root_orientation;
    const Quat& prev = work.frames[t - 1].root_orientation;
    if (q.w * prev.w + q.x * prev.x + q.y * prev.y + q.z * prev.z < 0.0)
      q = {-q.w, -q.x, -q.y, -q.z};
  }
  filter_channel([](const Pose& p) { return p.root_orientation.w; },
                 [](Pose& p, double v) { p.root_orientation.w = v; }, false);
  filter_channel([](const Pose& p) { return p.root_orientation.x; },
                 [](Pose& p, double v) { p.root_orientation.x = v; }, false);
  filter_channel([](const Pose& p) { return p.root_orientation.y; },
                 [](Pose& p, double v) { p.root_orientation.y = v; }, false);
  filter_channel([](const Pose& p) { return p.root_orientation.z; },
                 [](Pose& p, double v) { p.root_orientation.z = v; }, false);
  for (Pose& p : work.frames)
    p.root_orientation = p.root_orientation.normalized();

  // Resample at the original timestamps so count and fps are preserved
  // exactly; times past the downsampled span clamp to the last frame.
  MotionSequence out;
  out.fps = seq.fps;
  for (int t = 0; t < seq.frame_count(); ++t)
    out.frames.push_back(sample_at(work, t / seq.fps));
  out.recompute_velocities();
  return out;
}

}  // namespace wmkit
