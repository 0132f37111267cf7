#include "wmkit/minisim.hpp"

#include <algorithm>
#include <cmath>

namespace wmkit {

namespace {

constexpr double kGravity = 9.81;
constexpr int kVelocityIterations = 30;
constexpr int kPositionIterations = 10;

double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return a;
}

struct Segment {
  int a = 0, b = 0;
  double length = 0.0;
};

std::vector<Segment> segments_of(const PlanarChain& chain) {
  std::vector<Segment> segs;
  segs.push_back({0, 1, chain.base_length});
  for (int i = 0; i < chain.joint_count(); ++i)
    segs.push_back({i + 1, i + 2, chain.links[i].length});
  return segs;
}

std::vector<double> point_masses(const PlanarChain& chain) {
  std::vector<double> mu(chain.point_count(), 0.0);
  mu[0] += 0.5 * chain.base_mass;
  mu[1] += 0.5 * chain.base_mass;
  for (int i = 0; i < chain.joint_count(); ++i) {
    mu[i + 1] += 0.5 * chain.links[i].mass;
    mu[i + 2] += 0.5 * chain.links[i].mass;
  }
  return mu;
}

double segment_angle(const SimState& s, int a, int b) {
  const Vec2 d = s.points[b] - s.points[a];
  return std::atan2(d.y, d.x);
}

/// 2D signed distance in the x-z plane (y = 0); boxes must have yaw 0.
struct SurfaceHit {
  double sd = 1e30;
  Vec2 normal{0, 1};
  bool on_box = false;
};

SurfaceHit nearest_surface(const TerrainScene& scene, const Vec2& p) {
  SurfaceHit hit;
  hit.sd = p.y - scene.ground_height;
  hit.normal = {0, 1};
  for (const Box& box : scene.boxes) {
    const double dx = std::abs(p.x - box.center.x) - box.half_extents.x;
    const double dz = std::abs(p.y - box.center.z) - box.half_extents.z;
    double sd;
    Vec2 n;
    if (dx > 0.0 || dz > 0.0) {
      const double ox = std::max(dx, 0.0), oz = std::max(dz, 0.0);
      sd = std::sqrt(ox * ox + oz * oz);
      n = {ox * (p.x > box.center.x ? 1.0 : -1.0),
           oz * (p.y > box.center.z ? 1.0 : -1.0)};
      const double nn = n.norm();
      n = nn > 0.0 ? n * (1.0 / nn) : Vec2{0, 1};
    } else {
      // Inside: push out along the least-penetrated axis.
      if (dx > dz) {
        sd = dx;
        n = {p.x > box.center.x ? 1.0 : -1.0, 0.0};
      } else {
        sd = dz;
        n = {0.0, p.y > box.center.z ? 1.0 : -1.0};
      }
    }
    if (sd < hit.sd) hit = {sd, n, true};
  }
  return hit;
}

}  // namespace

void PlanarChain::validate() const {
  if (links.empty()) throw std::invalid_argument("chain needs >= 1 link");
  if (base_length <= 0.0 || base_mass <= 0.0)
    throw std::invalid_argument("base length/mass must be > 0");
  for (const Link& l : links)
    if (l.length <= 0.0 || l.mass <= 0.0)
      throw std::invalid_argument("link length/mass must be > 0");
  if (gains.kp.size() != links.size() || gains.kd.size() != links.size())
    throw std::invalid_argument("gains must match joint count");
}

double SimState::base_pitch() const { return segment_angle(*this, 0, 1); }

std::vector<double> SimState::joint_angles() const {
  const int n = static_cast<int>(points.size()) - 2;
  std::vector<double> q(n);
  double prev = base_pitch();
  for (int i = 0; i < n; ++i) {
    const double abs_angle = segment_angle(*this, i + 1, i + 2);
    q[i] = wrap_angle(abs_angle - prev);
    prev = abs_angle;
  }
  return q;
}

std::vector<double> SimState::joint_velocities() const {
  const int n = static_cast<int>(points.size()) - 2;
  auto omega = [&](int a, int b) {
    const Vec2 d = points[b] - points[a];
    const double len2 = d.dot(d);
    const Vec2 rel = velocities[b] - velocities[a];
    return len2 > 0.0 ? d.cross(rel) / len2 : 0.0;
  };
  std::vector<double> qd(n);
  double prev = omega(0, 1);
  for (int i = 0; i < n; ++i) {
    const double w = omega(i + 1, i + 2);
    qd[i] = w - prev;
    prev = w;
  }
  return qd;
}

bool SimState::any_box_contact() const {
  for (const ContactReport& c : contacts)
    if (c.on_box) return true;
  return false;
}

SimState make_state(const PlanarChain& chain, const Vec2& base, double pitch,
                    const std::vector<double>& q) {
  chain.validate();
  if (static_cast<int>(q.size()) != chain.joint_count())
    throw std::invalid_argument("joint angle count mismatch");
  SimState s;
  s.points.resize(chain.point_count());
  s.velocities.assign(chain.point_count(), {});
  s.points[0] = base;
  s.points[1] = base + Vec2{std::cos(pitch), std::sin(pitch)} * chain.base_length;
  double angle = pitch;
  for (int i = 0; i < chain.joint_count(); ++i) {
    angle += q[i];
    s.points[i + 2] =
        s.points[i + 1] +
        Vec2{std::cos(angle), std::sin(angle)} * chain.links[i].length;
  }
  return s;
}

SimState step(const PlanarChain& chain, const SimState& state,
              const std::vector<double>& torques, const TerrainScene& scene,
              double dt) {
  if (dt <= 0.0 || dt > 0.01) throw std::invalid_argument("dt out of range");
  if (static_cast<int>(torques.size()) != chain.joint_count())
    throw std::invalid_argument("torque count mismatch");

  const auto segs = segments_of(chain);
  const auto mu = point_masses(chain);
  const int np = chain.point_count();

  SimState next = state;
  next.contacts.clear();

  std::vector<Vec2> force(np, {0.0, 0.0});
  for (int j = 0; j < np; ++j) force[j].y -= mu[j] * kGravity;

  // Contact candidates: engage when already penetrating or when this step's
  // motion (including the gravity increment) would cross the surface; waiting
  // for observed penetration lets a fast point build spring energy for free.
  struct Contact {
    int j;
    SurfaceHit hit;
    double pn = 0.0, pt = 0.0;  // accumulated normal/tangential impulse
  };
  std::vector<Contact> touching;
  for (int j = 0; j < np; ++j) {
    const SurfaceHit hit = nearest_surface(scene, state.points[j]);
    const double vn = state.velocities[j].dot(hit.normal);
    const double vn_pred = vn - kGravity * hit.normal.y * dt;
    if (hit.sd < 0.0 || hit.sd + std::min(0.0, vn_pred) * dt < 0.0)
      touching.push_back({j, hit});
  }

  // Joint torque tau_i as an equal and opposite couple on the segments the
  // joint connects.
  for (int i = 0; i < chain.joint_count(); ++i) {
    const double tau = torques[i];
    if (tau == 0.0) continue;
    const Segment& child = segs[i + 1];
    const Segment& parent = segs[i];
    auto couple = [&](const Segment& s, double t) {
      const Vec2 d = state.points[s.b] - state.points[s.a];
      const double len = d.norm();
      if (len <= 0.0) return;
      const Vec2 f = Vec2{-d.y, d.x} * (t / (len * len));
      force[s.b] = force[s.b] + f;
      force[s.a] = force[s.a] - f;
    };
    couple(child, tau);
    couple(parent, -tau);
  }

  for (int j = 0; j < np; ++j)
    next.velocities[j] = state.velocities[j] + force[j] * (dt / mu[j]);

  // Gauss-Seidel over bars and contacts together. Bars kill relative
  // velocity along each segment. Contacts are a spring-damper integrated
  // implicitly (backward Euler) and applied as an accumulated impulse: the
  // force ends up consistent with the velocity the bars settle on, which is
  // what keeps the contact from pumping energy -- a penalty force computed
  // ahead of the constraint solve acts through a displacement the solve then
  // changes underneath it.
  for (int it = 0; it < kVelocityIterations; ++it) {
    for (const Segment& s : segs) {
      const Vec2 d = next.points[s.b] - next.points[s.a];
      const double len2 = d.dot(d);
      if (len2 <= 0.0) continue;
      const double c = (next.velocities[s.b] - next.velocities[s.a]).dot(d);
      const double lambda = c / (len2 * (1.0 / mu[s.a] + 1.0 / mu[s.b]));
      next.velocities[s.a] = next.velocities[s.a] + d * (lambda / mu[s.a]);
      next.velocities[s.b] = next.velocities[s.b] - d * (lambda / mu[s.b]);
    }
    const double k = chain.contact_stiffness, cd = chain.contact_damping;
    for (Contact& c : touching) {
      const double m = mu[c.j];
      const Vec2 n = c.hit.normal;
      const Vec2 tangent{-n.y, n.x};
      // Total normal impulse P must satisfy the implicit spring-damper
      // relation P = dt * (-k*sd' - cd*vn') with sd' and vn' taken at the
      // end of the step; solve for the correction given the current iterate.
      const double vn = next.velocities[c.j].dot(n);
      double dpn = (dt * (-k * c.hit.sd - (k * dt + cd) * vn) - c.pn) /
                   (1.0 + dt * (k * dt + cd) / m);
      const double pn_new = std::max(0.0, c.pn + dpn);
      next.velocities[c.j] = next.velocities[c.j] + n * ((pn_new - c.pn) / m);
      c.pn = pn_new;

      const double vt = next.velocities[c.j].dot(tangent);
      const double dpt = (-dt * cd * vt - c.pt) / (1.0 + dt * cd / m);
      const double pt_new = std::clamp(c.pt + dpt, -chain.friction * c.pn,
                                       chain.friction * c.pn);
      next.velocities[c.j] =
          next.velocities[c.j] + tangent * ((pt_new - c.pt) / m);
      c.pt = pt_new;
    }
  }
  for (const Contact& c : touching)
    if (c.pn > 0.0 || c.hit.sd < 0.0)
      next.contacts.push_back(
          {c.j, std::max(0.0, -c.hit.sd), c.pn / dt, c.hit.on_box});

  for (int j = 0; j < np; ++j)
    next.points[j] = next.points[j] + next.velocities[j] * dt;

  for (int it = 0; it < kPositionIterations; ++it) {
    for (const Segment& s : segs) {
      const Vec2 d = next.points[s.b] - next.points[s.a];
      const double len = d.norm();
      if (len <= 0.0) continue;
      const double err = len - s.length;
      const Vec2 dir = d * (1.0 / len);
      const double wa = 1.0 / mu[s.a], wb = 1.0 / mu[s.b];
      next.points[s.a] = next.points[s.a] + dir * (err * wa / (wa + wb));
      next.points[s.b] = next.points[s.b] - dir * (err * wb / (wa + wb));
    }
  }

  next.time = state.time + dt;
  for (int j = 0; j < np; ++j) {
    if (!std::isfinite(next.points[j].x) || !std::isfinite(next.points[j].y) ||
        !std::isfinite(next.velocities[j].x) ||
        !std::isfinite(next.velocities[j].y) ||
        std::abs(next.points[j].x) > 1e6 || std::abs(next.points[j].y) > 1e6)
      throw SimDiverged("simulation diverged at t=" +
                        std::to_string(next.time));
  }
  return next;
}

double mechanical_energy(const PlanarChain& chain, const SimState& state,
                         const TerrainScene& scene) {
  const auto mu = point_masses(chain);
  double e = 0.0;
  for (int j = 0; j < chain.point_count(); ++j) {
    e += 0.5 * mu[j] * state.velocities[j].dot(state.velocities[j]);
    e += mu[j] * kGravity * state.points[j].y;
    const SurfaceHit hit = nearest_surface(scene, state.points[j]);
    if (hit.sd < 0.0) e += 0.5 * chain.contact_stiffness * hit.sd * hit.sd;
  }
  return e;
}

DemoReport run_weightless_demo(
    const PlanarChain& chain, const TerrainScene& scene,
    const MotionSequence& reference,
    const std::vector<std::vector<double>>& w_schedule, const WMNetwork* net,
    const DemoConfig& config, const SimState& initial) {
  chain.validate();
  const int n_joints = chain.joint_count();
  const int ticks = static_cast<int>(config.duration * config.control_hz);
  const int substeps =
      std::max(1, static_cast<int>(std::lround(1.0 / (config.control_hz * config.dt))));

  DemoReport report;
  SimState state = initial;
  std::optional<OnlineInferencer> infer;
  if (net) infer.emplace(*net);
  std::deque<Eigen::VectorXd> measured_history;

  std::vector<bool> box_contact(ticks, false);
  std::vector<bool> settled(ticks, false);

  for (int ti = 0; ti < ticks; ++ti) {
    const double t = ti / config.control_hz;
    const int ref_idx = std::min(
        static_cast<int>(std::lround(t * reference.fps)),
        reference.frame_count() - 1);
    const std::vector<double> q = state.joint_angles();
    const std::vector<double> qd = state.joint_velocities();

    std::vector<double> w(n_joints, 1.0);
    if (net) {
      Eigen::VectorXd q_now(n_joints);
      for (int i = 0; i < n_joints; ++i) q_now[i] = q[i];
      while (static_cast<int>(measured_history.size()) < kHistorySteps)
        measured_history.push_back(q_now);
      std::vector<Eigen::VectorXd> hist(measured_history.begin(),
                                        measured_history.end());
      std::vector<Eigen::VectorXd> fut;
      for (int f = 1; f <= kFutureSteps; ++f) {
        const int idx =
            std::min(ref_idx + f, reference.frame_count() - 1);
        Eigen::VectorXd qr(n_joints);
        for (int i = 0; i < n_joints; ++i) qr[i] = reference.frames[idx].q[i];
        fut.push_back(qr);
      }
      const Eigen::VectorXd wv = infer->infer(hist, q_now, fut);
      for (int i = 0; i < n_joints; ++i) w[i] = wv[i];
      measured_history.pop_front();
      measured_history.push_back(q_now);
    } else if (!w_schedule.empty()) {
      const auto& row =
          w_schedule[std::min<size_t>(ref_idx, w_schedule.size() - 1)];
      w = row;
    }

    std::vector<double> tau =
        pd_torque(chain.gains, reference.frames[ref_idx].q, q, qd,
                  chain.torque_limits);
    tau = modulate(tau, w);

    for (int s = 0; s < substeps; ++s)
      state = step(chain, state, tau, scene, config.dt);

    report.trajectory.push_back(state);
    report.w_trace.push_back(w);
    box_contact[ti] = state.any_box_contact();
    double max_speed = 0.0;
    for (double v : state.joint_velocities())
      max_speed = std::max(max_speed, std::abs(v));
    settled[ti] = max_speed < config.settle_speed;
    if (state.base_position().y < config.fall_base_height && !box_contact[ti])
      report.fell = true;
  }

  const int hold_ticks =
      static_cast<int>(std::lround(config.contact_hold * config.control_hz));
  auto first_sustained = [&](const std::vector<bool>& flags, int hold) {
    int run = 0;
    for (int ti = 0; ti < ticks; ++ti) {
      run = flags[ti] ? run + 1 : 0;
      if (run >= hold) return (ti - hold + 1) / config.control_hz;
    }
    return -1.0;
  };
  report.contact_time = first_sustained(box_contact, hold_ticks);
  report.settle_time = first_sustained(
      settled,
      static_cast<int>(std::lround(config.settle_hold * config.control_hz)));
  return report;
}

}  // namespace wmkit
