#include "wmkit/control.hpp"

#include <algorithm>
#include <stdexcept>

namespace wmkit {

std::vector<double> action_to_target(const std::vector<double>& action,
                                     const std::vector<double>& q_default) {
  if (action.size() != q_default.size())
    throw std::invalid_argument("action/default length mismatch");
  std::vector<double> q_des(action.size());
  for (size_t i = 0; i < action.size(); ++i)
    q_des[i] = q_default[i] + action[i];
  return q_des;
}

std::vector<double> pd_torque(const PdGains& gains,
                              const std::vector<double>& q_des,
                              const std::vector<double>& q,
                              const std::vector<double>& qdot,
                              const std::vector<double>& torque_limits,
                              const std::vector<double>& motor_strength) {
  const size_t n = q.size();
  if (q_des.size() != n || qdot.size() != n || gains.kp.size() != n ||
      gains.kd.size() != n)
    throw std::invalid_argument("pd_torque length mismatch");
  std::vector<double> tau(n);
  for (size_t i = 0; i < n; ++i) {
    tau[i] = gains.kp[i] * (q_des[i] - q[i]) - gains.kd[i] * qdot[i];
    if (!torque_limits.empty()) {
      const double scale = motor_strength.empty() ? 1.0 : motor_strength[i];
      const double lim = torque_limits[i] * scale;
      tau[i] = std::clamp(tau[i], -lim, lim);
    }
  }
  return tau;
}

std::vector<double> modulate(const std::vector<double>& tau,
                             const std::vector<double>& w) {
  if (tau.size() != w.size())
    throw std::invalid_argument("modulate length mismatch");
  std::vector<double> out(tau.size());
  for (size_t i = 0; i < tau.size(); ++i) {
    if (w[i] < 0.0 || w[i] > 1.0)
      throw std::invalid_argument("relaxation level outside [0, 1]");
    out[i] = tau[i] * w[i];
  }
  return out;
}

DomainRandSample sample_domain_rand(const DomainRandRanges& ranges,
                                    int link_count, int joint_count,
                                    Rng& rng) {
  DomainRandSample s;
  s.link_mass_scale.resize(link_count);
  for (double& v : s.link_mass_scale)
    v = rng.uniform(ranges.link_mass[0], ranges.link_mass[1]);
  for (double& v : s.com_offset)
    v = rng.uniform(ranges.com_offset[0], ranges.com_offset[1]);
  s.friction = rng.uniform(ranges.friction[0], ranges.friction[1]);
  s.motor_strength_scale.resize(joint_count);
  for (double& v : s.motor_strength_scale)
    v = rng.uniform(ranges.motor_strength[0], ranges.motor_strength[1]);
  s.kp_scale = rng.uniform(ranges.kp_scale[0], ranges.kp_scale[1]);
  s.kd_scale = rng.uniform(ranges.kd_scale[0], ranges.kd_scale[1]);
  s.action_delay_ms =
      rng.uniform(ranges.action_delay_ms[0], ranges.action_delay_ms[1]);
  return s;
}

std::vector<double> DelayBuffer::apply(double now_ms,
                                       const std::vector<double>& action) {
  if (now_ms < last_ms_) throw std::invalid_argument("time went backwards");
  last_ms_ = now_ms;
  queue_.emplace_back(now_ms, action);
  // Newest entry aged >= delay; drop everything older than it.
  size_t pick = 0;
  for (size_t i = 0; i < queue_.size(); ++i)
    if (now_ms - queue_[i].first >= delay_ms_) pick = i;
  while (pick > 0) {
    queue_.pop_front();
    --pick;
  }
  return queue_.front().second;
}

}  // namespace wmkit
