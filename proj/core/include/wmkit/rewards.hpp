#pragma once

#include <array>
#include <deque>
#include <string>
#include <vector>

#include "wmkit/geometry.hpp"
#include "wmkit/math.hpp"

namespace wmkit {

/// Per-term weights; defaults are the training values.
struct RewardWeights {
  double keypoint_position = 3.00;
  double root_rotation = 0.5;
  double root_velocity = 0.75;
  double joint_position_wo_feet = 32.0;
  double joint_velocity_wo_feet = 0.5;
  double termination = -200.0;
  double joint_acceleration = -2.5e-8;
  double joint_velocity = -0.001;
  double action_rate = -0.5;
  double torque = -1e-6;
  double feet_orientation = -62.5;
  double feet_heading = -1e-5;

  double weight_of(const std::string& term) const;
};

const std::vector<std::string>& reward_term_names();

struct FrameState {
  std::vector<double> q, qdot, qddot;
  Vec3 root_position;
  Quat root_orientation;
  Vec3 root_velocity;
  Vec3 root_ang_velocity;
  std::vector<Vec3> keypoints;          // world joint positions
  std::vector<double> action, prev_action;
  std::vector<double> torques;
  std::vector<Quat> feet_orientations;  // world frame, one per foot
  Vec3 projected_gravity{0, 0, -1};
  std::vector<double> joints_no_feet, joint_vel_no_feet;  // d_t, d-dot_t
  bool terminated = false;
};

struct ReferenceFrame {
  std::vector<Vec3> keypoints;
  Quat root_orientation;
  Vec3 root_velocity;
  std::vector<double> joints_no_feet, joint_vel_no_feet;
};

/// Unweighted value of one reward row. Throws on an unknown term name.
double reward_term(const std::string& name, const FrameState& state,
                   const ReferenceFrame& ref);

struct RewardBreakdown {
  std::vector<std::pair<std::string, double>> weighted_terms;
  double total = 0.0;
};

RewardBreakdown total_reward(const FrameState& state, const ReferenceFrame& ref,
                             const RewardWeights& weights);

/// Inputs for one single-step actor observation block:
/// [q, qdot, root angular velocity, projected gravity, previous action,
/// reference q, reference qdot, height map]. Block size 5K + 38
/// (153 for K = 23).
struct ActorObsInput {
  std::vector<double> q, qdot;
  Vec3 root_ang_velocity;
  Vec3 projected_gravity{0, 0, -1};
  std::vector<double> prev_action;
  std::vector<double> q_ref, qdot_ref;
  std::array<double, kHeightMapSize> height_map{};
};

int actor_obs_block_size(int joint_count);

std::vector<double> actor_obs_block(const ActorObsInput& in);

/// Rolling buffer of the n most recent single-step blocks; zero blocks until
/// warmed up.
class ObsHistory {
 public:
  ObsHistory(int steps, int block_size)
      : steps_(steps), block_size_(block_size) {}

  void push(const std::vector<double>& block);
  int steps() const { return steps_; }

  /// History flattened most-recent-first, zero-padded to steps() blocks.
  std::vector<double> flattened() const;

 private:
  int steps_, block_size_;
  std::deque<std::vector<double>> blocks_;
};

/// Current block followed by the flattened history; length
/// block_size * (1 + n). Contains no privileged fields.
std::vector<double> build_actor_obs(const ActorObsInput& current,
                                    const ObsHistory& history);

/// Actor observation plus privileged scalars [v_root, friction, f_ext].
std::vector<double> build_critic_obs(const std::vector<double>& actor_obs,
                                     const Vec3& v_root, double friction,
                                     const Vec3& external_force);

}  // namespace wmkit
