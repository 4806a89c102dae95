// Mochi swarm simulator: shared math types and rotation helpers
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace mochi {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
    if (a > -kPi && a <= kPi) {
        return a;
    }
    double w = std::fmod(a + kPi, 2.0 * kPi);
    if (w <= 0.0) {
        w += 2.0 * kPi;
    }
    return w - kPi;
}

/// Shortest signed rotation taking `from` onto `to`, in (-pi, pi].
inline double angle_diff(double to, double from) { return wrap_angle(to - from); }

/// Body-to-world rotation for ZYX Euler angles stored as (roll, pitch, yaw).
///
/// R = Rz(psi) * Ry(theta) * Rx(phi). Zero angles give an exact identity.
inline Mat3 rotation_zyx(const Vec3 &euler) {
    const double cr = std::cos(euler.x()), sr = std::sin(euler.x());
    const double cp = std::cos(euler.y()), sp = std::sin(euler.y());
    const double cy = std::cos(euler.z()), sy = std::sin(euler.z());
    Mat3 R;
    R << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
         sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
         -sp,     cp * sr,                cp * cr;
    return R;
}

/// Maps body angular velocity onto ZYX Euler angle rates.
inline Vec3 euler_rates(const Vec3 &euler, const Vec3 &omega_body) {
    const double cr = std::cos(euler.x()), sr = std::sin(euler.x());
    const double cp = std::cos(euler.y());
    const double tp = std::tan(euler.y());
    const double p = omega_body.x(), q = omega_body.y(), r = omega_body.z();
    return {p + sr * tp * q + cr * tp * r,
            cr * q - sr * r,
            (sr * q + cr * r) / cp};
}

inline bool all_finite(const Vec3 &v) {
    return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

} // namespace mochi
