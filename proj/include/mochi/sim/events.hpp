// Capture and delivery rules
#pragma once

#include <mochi/dynamics/types.hpp>
#include <mochi/sim/config.hpp>

namespace mochi::sim {

/// Center of the net cylinder, hanging straight down from the COM.
inline Vec3 net_center(const dynamics::RigidState &s, const CaptureGeometry &g) {
    return s.position - Vec3(0.0, 0.0, g.drop);
}

inline double forward_speed(const dynamics::RigidState &s) {
    return (s.rotation().transpose() * s.velocity).x();
}

inline bool inside_net(const dynamics::RigidState &s, const Vec3 &balloon, const CaptureGeometry &g) {
    const Vec3 d = balloon - net_center(s, g);
    return d.head<2>().norm() <= g.radius && std::abs(d.z()) <= 0.5 * g.height;
}

/// The balloon is in the net and the blimp moves forward fast enough to lift the weight.
inline bool check_capture(const dynamics::RigidState &s, const Vec3 &balloon, const CaptureGeometry &g) {
    return inside_net(s, balloon, g) && forward_speed(s) >= g.min_speed;
}

/// Contact near the hoop or a COM step that crosses the opening.
inline bool check_delivery(const Vec3 &prev, const Vec3 &cur, bool carrying, const HoopSpec &hoop,
                           const CaptureGeometry &g) {
    if (!carrying) {
        return false;
    }
    if ((cur - hoop.center).norm() <= hoop.aperture + g.delivery_margin) {
        return true;
    }
    const Vec3 n = hoop.normal();
    const double s0 = n.dot(prev - hoop.center);
    const double s1 = n.dot(cur - hoop.center);
    if (s0 == s1 || (s0 > 0.0 && s1 > 0.0) || (s0 < 0.0 && s1 < 0.0)) {
        return false;
    }
    const double t = s0 / (s0 - s1);
    const Vec3 x = prev + t * (cur - prev);
    return (x - hoop.center).norm() <= hoop.aperture;
}

} // namespace mochi::sim
