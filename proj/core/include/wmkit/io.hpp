#pragma once

#include <string>
#include <vector>

#include "wmkit/autolabel.hpp"
#include "wmkit/control.hpp"
#include "wmkit/geometry.hpp"
#include "wmkit/minisim.hpp"
#include "wmkit/motion.hpp"
#include "wmkit/rewards.hpp"

namespace wmkit {

/// All JSON artifacts carry a format_version field; loading an unknown
/// version throws. Field orders and the label run-length encoding are frozen
/// in FORMATS.md. Load errors throw std::runtime_error with the parse
/// position for malformed files.

KinematicTree load_tree(const std::string& path);
void save_tree(const KinematicTree& tree, const std::string& path);

TerrainScene load_scene(const std::string& path);
void save_scene(const TerrainScene& scene, const std::string& path);

MotionSequence load_motion(const std::string& path);
void save_motion(const MotionSequence& seq, const std::string& path);

WeightlessAnnotation load_annotation(const std::string& path);
void save_annotation(const WeightlessAnnotation& ann, const std::string& path);

DomainRandRanges load_rand_ranges(const std::string& path);
void save_rand_ranges(const DomainRandRanges& ranges, const std::string& path);

/// One row per frame: every weighted reward term plus the total.
void write_reward_csv(const std::string& path,
                      const std::vector<RewardBreakdown>& rows);

/// Per-frame relaxation levels, one column per joint.
void write_w_trace_csv(const std::string& path,
                       const std::vector<std::vector<double>>& w);

/// time, base pose, joint angles/velocities, contact count, w, torques.
void write_trajectory_csv(const std::string& path, const DemoReport& report,
                          double control_hz);

/// Observation layout manifest for downstream trainers.
void write_obs_layout(const std::string& path, int joint_count,
                      int history_steps);

}  // namespace wmkit
