#pragma once

#include <array>
#include <cmath>

namespace wmkit {

struct Vec2 {
  double x = 0.0, y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    double n = norm();
    return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{};
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Unit quaternion (w, x, y, z) representing a rotation.
struct Quat {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  static Quat identity() { return {}; }

  static Quat from_axis_angle(const Vec3& axis, double angle) {
    const double h = 0.5 * angle;
    const double s = std::sin(h);
    const Vec3 a = axis.normalized();
    return {std::cos(h), a.x * s, a.y * s, a.z * s};
  }

  static Quat from_yaw(double yaw) { return from_axis_angle({0, 0, 1}, yaw); }

  Quat operator*(const Quat& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z,
            w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x,
            w * o.z + x * o.y - y * o.x + z * o.w};
  }

  Quat conjugate() const { return {w, -x, -y, -z}; }

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

  Quat normalized() const {
    double n = norm();
    return {w / n, x / n, y / n, z / n};
  }

  Vec3 rotate(const Vec3& v) const {
    // q * (0,v) * q^-1 expanded.
    const Vec3 u{x, y, z};
    const Vec3 t = 2.0 * u.cross(v);
    return v + w * t + u.cross(t);
  }

  /// Geodesic angle of the relative rotation this^-1 * other, in [0, pi].
  double angle_to(const Quat& o) const {
    const Quat d = conjugate() * o;
    double c = std::clamp(std::abs(d.w) / d.norm(), 0.0, 1.0);
    return 2.0 * std::acos(c);
  }

  /// Yaw (rotation about world z) of the frame this quaternion encodes.
  double yaw() const {
    const Vec3 fwd = rotate({1, 0, 0});
    return std::atan2(fwd.y, fwd.x);
  }
};

inline Quat slerp(const Quat& a, Quat b, double t) {
  double d = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
  if (d < 0.0) {
    b = {-b.w, -b.x, -b.y, -b.z};
    d = -d;
  }
  if (d > 1.0 - 1e-12) {
    // Nearly parallel: lerp and renormalize.
    Quat r{a.w + t * (b.w - a.w), a.x + t * (b.x - a.x),
           a.y + t * (b.y - a.y), a.z + t * (b.z - a.z)};
    return r.normalized();
  }
  const double th = std::acos(d);
  const double s = std::sin(th);
  const double wa = std::sin((1.0 - t) * th) / s;
  const double wb = std::sin(t * th) / s;
  return Quat{wa * a.w + wb * b.w, wa * a.x + wb * b.x,
              wa * a.y + wb * b.y, wa * a.z + wb * b.z}
      .normalized();
}

}  // namespace wmkit
