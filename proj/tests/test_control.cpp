#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "wmkit/control.hpp"

using namespace wmkit;

TEST_CASE("action_to_target offsets the default posture") {
  CHECK(action_to_target({0.1, -0.2}, {0.5, 1.0}) ==
        std::vector<double>{0.6, 0.8});
  CHECK_THROWS_AS(action_to_target({0.1}, {0.5, 1.0}), std::invalid_argument);
}

TEST_CASE("pd_torque: equilibrium, proportional/derivative parts, clamp") {
  const PdGains gains{{100.0, 50.0}, {2.0, 1.0}};
  // At the target with zero velocity the torque vanishes.
  CHECK(pd_torque(gains, {0.3, -0.1}, {0.3, -0.1}, {0.0, 0.0}) ==
        std::vector<double>{0.0, 0.0});

  // kp * err - kd * qdot, per joint.
  const auto tau = pd_torque(gains, {1.0, 0.0}, {0.0, 0.0}, {0.5, -2.0});
  CHECK(tau[0] == doctest::Approx(100.0 - 1.0).epsilon(1e-12));
  CHECK(tau[1] == doctest::Approx(2.0).epsilon(1e-12));

  // Clamp to torque_limit * motor_strength.
  const auto clamped =
      pd_torque(gains, {1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {40.0, 40.0},
                {0.5, 1.0});
  CHECK(clamped[0] == 20.0);  // 100 -> +-40*0.5
  CHECK(clamped[1] == 0.0);
  const auto neg =
      pd_torque(gains, {-1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {40.0, 40.0});
  CHECK(neg[0] == -40.0);

  CHECK_THROWS_AS(pd_torque(gains, {1.0}, {0.0, 0.0}, {0.0, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("modulate: elementwise relaxation with [0,1] enforcement") {
  CHECK(modulate({10.0, -6.0, 3.0}, {1.0, 0.5, 0.0}) ==
        std::vector<double>{10.0, -3.0, 0.0});
  CHECK_THROWS_AS(modulate({1.0}, {1.5}), std::invalid_argument);
  CHECK_THROWS_AS(modulate({1.0}, {-0.1}), std::invalid_argument);
  CHECK_THROWS_AS(modulate({1.0, 2.0}, {0.5}), std::invalid_argument);
}

TEST_CASE("domain randomization: bounds, shapes, coverage, determinism") {
  const DomainRandRanges ranges;
  Rng rng(404);
  double mass_lo = 1e9, mass_hi = -1e9, delay_lo = 1e9, delay_hi = -1e9;
  double mass_mean = 0.0;
  const int trials = 2000;
  for (int trial = 0; trial < trials; ++trial) {
    const DomainRandSample s = sample_domain_rand(ranges, 12, 23, rng);
    REQUIRE(s.link_mass_scale.size() == 12);
    REQUIRE(s.motor_strength_scale.size() == 23);
    for (double v : s.link_mass_scale) {
      CHECK(v >= 0.8);
      CHECK(v <= 1.2);
      mass_lo = std::min(mass_lo, v);
      mass_hi = std::max(mass_hi, v);
      mass_mean += v;
    }
    for (double v : s.com_offset) {
      CHECK(v >= -0.1);
      CHECK(v <= 0.1);
    }
    CHECK(s.friction >= 0.5);
    CHECK(s.friction <= 1.5);
    for (double v : s.motor_strength_scale) {
      CHECK(v >= 0.8);
      CHECK(v <= 1.2);
    }
    CHECK(s.kp_scale >= 0.75);
    CHECK(s.kp_scale <= 1.25);
    CHECK(s.kd_scale >= 0.75);
    CHECK(s.kd_scale <= 1.25);
    CHECK(s.action_delay_ms >= 5.0);
    CHECK(s.action_delay_ms <= 25.0);
    delay_lo = std::min(delay_lo, s.action_delay_ms);
    delay_hi = std::max(delay_hi, s.action_delay_ms);
  }
  // The draws actually spread over the ranges rather than pinning a corner.
  CHECK(mass_lo < 0.85);
  CHECK(mass_hi > 1.15);
  CHECK(delay_lo < 7.0);
  CHECK(delay_hi > 23.0);
  CHECK(mass_mean / (trials * 12.0) == doctest::Approx(1.0).epsilon(0.01));

  Rng a(5), b(5);
  const DomainRandSample sa = sample_domain_rand(ranges, 3, 4, a);
  const DomainRandSample sb = sample_domain_rand(ranges, 3, 4, b);
  CHECK(sa.link_mass_scale == sb.link_mass_scale);
  CHECK(sa.friction == sb.friction);
  CHECK(sa.action_delay_ms == sb.action_delay_ms);
}

namespace {

std::vector<double> act(int i) { return {double(i)}; }

}  // namespace

TEST_CASE("delay buffer: traces at 0, 20 and 25 ms with a 50 Hz tick") {
  // Zero delay passes actions straight through.
  DelayBuffer none(0.0);
  for (int t = 0; t < 5; ++t)
    CHECK(none.apply(t * 20.0, act(t)) == act(t));

  // 20 ms delay at a 20 ms tick lags by exactly one action.
  DelayBuffer one(20.0);
  CHECK(one.apply(0.0, act(0)) == act(0));  // warm-up: oldest available
  for (int t = 1; t < 6; ++t)
    CHECK(one.apply(t * 20.0, act(t)) == act(t - 1));

  // 25 ms delay needs two ticks before an action becomes visible.
  DelayBuffer two(25.0);
  CHECK(two.apply(0.0, act(0)) == act(0));
  CHECK(two.apply(20.0, act(1)) == act(0));
  for (int t = 2; t < 7; ++t)
    CHECK(two.apply(t * 20.0, act(t)) == act(t - 2));
}

TEST_CASE("delay buffer: returned actions never go backwards") {
  Rng rng(66);
  for (int trial = 0; trial < 50; ++trial) {
    DelayBuffer buf(rng.uniform(0.0, 40.0));
    double now = 0.0;
    int last = -1;
    for (int t = 0; t < 40; ++t) {
      now += rng.uniform(1.0, 30.0);
      const auto out = buf.apply(now, act(t));
      const int got = static_cast<int>(out[0]);
      CHECK(got >= last);   // no reordering
      CHECK(got <= t);      // never from the future
      last = got;
    }
  }
  DelayBuffer buf(10.0);
  buf.apply(5.0, act(0));
  CHECK_THROWS_AS(buf.apply(4.0, act(1)), std::invalid_argument);
}
