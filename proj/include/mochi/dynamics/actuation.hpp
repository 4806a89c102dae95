// Mochi blimp model: servo-rotor wrench generation and closed-form allocation
#pragma once

#include <mochi/dynamics/types.hpp>

#include <algorithm>
#include <cmath>

namespace mochi::dynamics {

/// Unit thrust direction of a rotor tilted by `alpha` from x_B toward z_B.
inline Vec3 rotor_direction(double alpha) { return {std::cos(alpha), 0.0, std::sin(alpha)}; }

/// Net body-frame force and torque produced by the two servo-rotor stacks.
///
///   f   = sum_i f_i [cos a_i, 0, sin a_i]
///   tau = sum_i f_i (p_i x [cos a_i, 0, sin a_i])
///
/// The y component of the force is identically zero: the vehicle cannot push sideways.
inline Wrench thrust_wrench(const ActuatorCommand &cmd, const BlimpParams &params) {
    Wrench w{.frame = Frame::Body};
    const double thrust[2] = {cmd.f1, cmd.f2};
    const double tilt[2] = {cmd.alpha1, cmd.alpha2};
    for (int i = 0; i < 2; ++i) {
        const Vec3 u = rotor_direction(tilt[i]);
        w.force += thrust[i] * u;
        w.torque += thrust[i] * params.rotor_position(i + 1).cross(u);
    }
    w.force.y() = 0.0;
    return w;
}

struct Allocation {
    ActuatorCommand command;
    bool saturated = false;
};

/// Solves (f_i, alpha_i) for a desired body force (f_x, f_z) and yaw torque tau_z.
///
/// Per rotor i = 1, 2:
///   f_ix = (f_x + (-1)^i tau_z / d) / 2,   f_iz = (f_z + (-1)^(i+1) tau_x / d) / 2
///   f_i  = |(f_ix, f_iz)|,                 alpha_i = atan2(f_iz, f_ix)
///
/// Thrust is clamped to [0, f_max] first, then the tilt to the servo range; the
/// companion actuator is not rescaled. `tau_x` is an unused slot fed zero by the controller.
inline Allocation allocate(double f_x, double f_z, double tau_z, const BlimpParams &params,
                           double tau_x = 0.0) {
    Allocation out;
    const double d = params.arm_half_span;
    double *thrust[2] = {&out.command.f1, &out.command.f2};
    double *tilt[2] = {&out.command.alpha1, &out.command.alpha2};
    for (int i = 1; i <= 2; ++i) {
        const double sign = (i % 2 == 0) ? 1.0 : -1.0; // (-1)^i
        const double f_ix = 0.5 * (f_x + sign * tau_z / d);
        const double f_iz = 0.5 * (f_z - sign * tau_x / d);
        const double f = std::hypot(f_ix, f_iz);
        const double alpha = std::atan2(f_iz, f_ix);

        const double f_clamped = std::clamp(f, 0.0, params.max_thrust);
        const double alpha_clamped = std::clamp(alpha, params.servo_min, params.servo_max);
        out.saturated = out.saturated || f_clamped != f || alpha_clamped != alpha;
        *thrust[i - 1] = f_clamped;
        *tilt[i - 1] = alpha_clamped;
    }
    return out;
}

} // namespace mochi::dynamics
