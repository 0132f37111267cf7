#pragma once

#include <deque>
#include <vector>

#include "wmkit/rng.hpp"

namespace wmkit {

struct PdGains {
  std::vector<double> kp;  // Nm/rad, >= 0
  std::vector<double> kd;  // Nm*s/rad, >= 0
};

/// q_des = q_default + a.
std::vector<double> action_to_target(const std::vector<double>& action,
                                     const std::vector<double>& q_default);

/// tau = kp (q_des - q) - kd qdot, clamped per joint to
/// +-(torque_limit * motor_strength). Empty limits mean unclamped.
std::vector<double> pd_torque(const PdGains& gains,
                              const std::vector<double>& q_des,
                              const std::vector<double>& q,
                              const std::vector<double>& qdot,
                              const std::vector<double>& torque_limits = {},
                              const std::vector<double>& motor_strength = {});

/// Elementwise relaxation scaling tau * w; w_i = 0 severs joint i entirely.
std::vector<double> modulate(const std::vector<double>& tau,
                             const std::vector<double>& w);

struct DomainRandRanges {
  double link_mass[2] = {0.8, 1.2};
  double com_offset[2] = {-0.1, 0.1};
  double friction[2] = {0.5, 1.5};
  double motor_strength[2] = {0.8, 1.2};
  double kp_scale[2] = {0.75, 1.25};
  double kd_scale[2] = {0.75, 1.25};
  double action_delay_ms[2] = {5.0, 25.0};
};

struct DomainRandSample {
  std::vector<double> link_mass_scale;      // per link
  double com_offset[3] = {0, 0, 0};
  double friction = 1.0;
  std::vector<double> motor_strength_scale;  // per joint
  double kp_scale = 1.0;
  double kd_scale = 1.0;
  double action_delay_ms = 0.0;
};

DomainRandSample sample_domain_rand(const DomainRandRanges& ranges,
                                    int link_count, int joint_count, Rng& rng);

/// FIFO of timestamped actions; read() returns the newest action whose age
/// is at least the configured delay, or the oldest one while warming up.
class DelayBuffer {
 public:
  explicit DelayBuffer(double delay_ms) : delay_ms_(delay_ms) {}

  std::vector<double> apply(double now_ms, const std::vector<double>& action);

  double delay_ms() const { return delay_ms_; }

 private:
  double delay_ms_;
  double last_ms_ = -1.0;
  std::deque<std::pair<double, std::vector<double>>> queue_;
};

}  // namespace wmkit
