#include "wmkit/rewards.hpp"

#include <cmath>
#include <stdexcept>

namespace wmkit {

namespace {

double norm_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double sq_norm_diff(const std::vector<double>& a,
                    const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("reward vector length mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return a;
}

}  // namespace

const std::vector<std::string>& reward_term_names() {
  static const std::vector<std::string> names = {
      "keypoint_position",      "root_rotation",
      "root_velocity",          "joint_position_wo_feet",
      "joint_velocity_wo_feet", "termination",
      "joint_acceleration",     "joint_velocity",
      "action_rate",            "torque",
      "feet_orientation",       "feet_heading"};
  return names;
}

double RewardWeights::weight_of(const std::string& term) const {
  if (term == "keypoint_position") return keypoint_position;
  if (term == "root_rotation") return root_rotation;
  if (term == "root_velocity") return root_velocity;
  if (term == "joint_position_wo_feet") return joint_position_wo_feet;
  if (term == "joint_velocity_wo_feet") return joint_velocity_wo_feet;
  if (term == "termination") return termination;
  if (term == "joint_acceleration") return joint_acceleration;
  if (term == "joint_velocity") return joint_velocity;
  if (term == "action_rate") return action_rate;
  if (term == "torque") return torque;
  if (term == "feet_orientation") return feet_orientation;
  if (term == "feet_heading") return feet_heading;
  throw std::invalid_argument("unknown reward term '" + term + "'");
}

double reward_term(const std::string& name, const FrameState& state,
                   const ReferenceFrame& ref) {
  if (name == "keypoint_position") {
    if (state.keypoints.size() != ref.keypoints.size())
      throw std::invalid_argument("keypoint count mismatch");
    double err = 0.0;
    for (size_t i = 0; i < state.keypoints.size(); ++i) {
      const Vec3 d = state.keypoints[i] - ref.keypoints[i];
      err += d.dot(d);
    }
    return std::exp(-0.1 * err);
  }
  if (name == "root_rotation")
    return std::exp(-1.0 * state.root_orientation.angle_to(ref.root_orientation));
  if (name == "root_velocity")
    return std::exp(-1.0 * (state.root_velocity - ref.root_velocity).norm());
  if (name == "joint_position_wo_feet")
    return std::exp(-1.0 * sq_norm_diff(state.joints_no_feet,
                                        ref.joints_no_feet));
  if (name == "joint_velocity_wo_feet")
    return std::exp(-1.0 * sq_norm_diff(state.joint_vel_no_feet,
                                        ref.joint_vel_no_feet));
  if (name == "termination") return state.terminated ? 1.0 : 0.0;
  if (name == "joint_acceleration") return norm_of(state.qddot);
  if (name == "joint_velocity") return norm_of(state.qdot);
  if (name == "action_rate") {
    double s = 0.0;
    for (size_t i = 0; i < state.action.size(); ++i) {
      const double d = state.action[i] - state.prev_action[i];
      s += d * d;
    }
    return std::sqrt(s);
  }
  if (name == "torque") return norm_of(state.torques);
  if (name == "feet_orientation") {
    // Gravity expressed in each foot frame; flat feet have no xy component.
    double s = 0.0;
    for (const Quat& foot : state.feet_orientations) {
      const Vec3 g = foot.conjugate().rotate(state.projected_gravity);
      s += std::sqrt(g.x * g.x + g.y * g.y);
    }
    return s;
  }
  if (name == "feet_heading") {
    const double root_yaw = state.root_orientation.yaw();
    double s = 0.0;
    for (const Quat& foot : state.feet_orientations) {
      const double d = wrap_angle(foot.yaw() - root_yaw);
      s += d * d;
    }
    return std::sqrt(s);
  }
  throw std::invalid_argument("unknown reward term '" + name + "'");
}

RewardBreakdown total_reward(const FrameState& state, const ReferenceFrame& ref,
                             const RewardWeights& weights) {
  RewardBreakdown out;
  for (const std::string& name : reward_term_names()) {
    const double value = weights.weight_of(name) * reward_term(name, state, ref);
    out.weighted_terms.emplace_back(name, value);
    out.total += value;
  }
  return out;
}

int actor_obs_block_size(int joint_count) {
  return 5 * joint_count + 3 + 3 + kHeightMapSize;
}

std::vector<double> actor_obs_block(const ActorObsInput& in) {
  const size_t k = in.q.size();
  if (in.qdot.size() != k || in.prev_action.size() != k ||
      in.q_ref.size() != k || in.qdot_ref.size() != k)
    throw std::invalid_argument("observation component length mismatch");
  std::vector<double> block;
  block.reserve(actor_obs_block_size(static_cast<int>(k)));
  auto append = [&](const std::vector<double>& v) {
    block.insert(block.end(), v.begin(), v.end());
  };
  auto append3 = [&](const Vec3& v) {
    block.push_back(v.x);
    block.push_back(v.y);
    block.push_back(v.z);
  };
  append(in.q);
  append(in.qdot);
  append3(in.root_ang_velocity);
  append3(in.projected_gravity);
  append(in.prev_action);
  append(in.q_ref);
  append(in.qdot_ref);
  block.insert(block.end(), in.height_map.begin(), in.height_map.end());
  return block;
}

void ObsHistory::push(const std::vector<double>& block) {
  if (static_cast<int>(block.size()) != block_size_)
    throw std::invalid_argument("history block size mismatch");
  blocks_.push_front(block);
  while (static_cast<int>(blocks_.size()) > steps_) blocks_.pop_back();
}

std::vector<double> ObsHistory::flattened() const {
  std::vector<double> out;
  out.reserve(size_t(steps_) * block_size_);
  for (const auto& b : blocks_) out.insert(out.end(), b.begin(), b.end());
  out.resize(size_t(steps_) * block_size_, 0.0);
  return out;
}

std::vector<double> build_actor_obs(const ActorObsInput& current,
                                    const ObsHistory& history) {
  std::vector<double> obs = actor_obs_block(current);
  const std::vector<double> hist = history.flattened();
  obs.insert(obs.end(), hist.begin(), hist.end());
  return obs;
}

std::vector<double> build_critic_obs(const std::vector<double>& actor_obs,
                                     const Vec3& v_root, double friction,
                                     const Vec3& external_force) {
  std::vector<double> obs = actor_obs;
  obs.insert(obs.end(), {v_root.x, v_root.y, v_root.z, friction,
                         external_force.x, external_force.y,
                         external_force.z});
  return obs;
}

}  // namespace wmkit
