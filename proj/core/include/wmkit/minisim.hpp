#pragma once

#include <optional>
#include <vector>

#include "wmkit/control.hpp"
#include "wmkit/geometry.hpp"
#include "wmkit/motion.hpp"
#include "wmkit/wm_network.hpp"

namespace wmkit {

/// Planar articulated chain in the x-z plane: a rigid two-point base segment
/// followed by N links, every inter-segment joint actuated. Segments are
/// rigid (velocity-level impulses plus position projection); contact is a
/// penalty spring-damper with a Coulomb friction clamp at segment endpoints.
struct PlanarChain {
  struct Link {
    double length = 0.3;  // m
    double mass = 1.0;    // kg
  };
  double base_length = 0.2;
  double base_mass = 2.0;
  std::vector<Link> links;
  PdGains gains;                       // per joint
  std::vector<double> torque_limits;   // per joint, empty = unclamped

  double contact_stiffness = 2e4;   // N/m
  double contact_damping = 200.0;   // N*s/m
  double friction = 1.0;            // Coulomb coefficient

  int joint_count() const { return static_cast<int>(links.size()); }
  int point_count() const { return joint_count() + 2; }

  void validate() const;
};

struct ContactReport {
  int point = 0;
  double penetration = 0.0;   // m, >= 0
  double normal_force = 0.0;  // N
  bool on_box = false;
};

struct SimState {
  std::vector<Vec2> points;      // base endpoints then link endpoints
  std::vector<Vec2> velocities;
  double time = 0.0;
  std::vector<ContactReport> contacts;

  Vec2 base_position() const { return points[0]; }
  double base_pitch() const;
  /// Relative joint angles, length N.
  std::vector<double> joint_angles() const;
  std::vector<double> joint_velocities() const;
  bool any_box_contact() const;
};

/// Chain at rest with the given base pose and joint angles.
SimState make_state(const PlanarChain& chain, const Vec2& base, double pitch,
                    const std::vector<double>& q);

/// One semi-implicit Euler step under gravity, joint torques and penalty
/// contact. Throws SimDiverged if the state leaves the finite range.
SimState step(const PlanarChain& chain, const SimState& state,
              const std::vector<double>& torques, const TerrainScene& scene,
              double dt);

struct SimDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DemoReport {
  double contact_time = -1.0;  // s; first persistent box contact, -1 if none
  double settle_time = -1.0;   // s; joint speeds < 0.05 rad/s held 0.5 s
  bool fell = false;           // base below threshold with no box contact
  std::vector<SimState> trajectory;           // one entry per control tick
  std::vector<std::vector<double>> w_trace;   // relaxation per tick
};

struct DemoConfig {
  double duration = 5.0;        // s
  double control_hz = 50.0;
  double dt = 1e-3;             // 20 substeps per control tick at 50 Hz
  double settle_speed = 0.05;   // rad/s
  double settle_hold = 0.5;     // s
  double contact_hold = 0.5;    // s of unbroken box contact
  double fall_base_height = 0.12;  // m
};

/// Closed-loop run: PD tracks the reference joint trajectory; per-tick
/// relaxation comes from the label schedule (one K-vector per reference
/// frame) or, when given, from online network inference.
DemoReport run_weightless_demo(const PlanarChain& chain,
                               const TerrainScene& scene,
                               const MotionSequence& reference,
                               const std::vector<std::vector<double>>& w_schedule,
                               const WMNetwork* net, const DemoConfig& config,
                               const SimState& initial);

/// Kinetic + gravitational + contact-spring energy of a state.
double mechanical_energy(const PlanarChain& chain, const SimState& state,
                         const TerrainScene& scene);

}  // namespace wmkit
