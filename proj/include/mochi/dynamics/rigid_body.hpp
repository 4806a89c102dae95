// Mochi blimp model: external loads and Newton-Euler time integration
#pragma once

#include <mochi/dynamics/actuation.hpp>

#include <cmath>
#include <stdexcept>

namespace mochi::dynamics {

/// Pitch magnitude beyond which the Euler-angle representation is not trusted.
inline constexpr double kMaxPitch = deg2rad(60.0);

/// Gravity and buoyancy acting on the blimp.
///
/// f_e = [0, 0, f_b - m g] in {W}. The buoyant force acts at the center of buoyancy,
/// `l` above the COM along z_B, so the righting torque in {B} is
/// [0, 0, l] x (R^T [0, 0, f_b]) (the world-frame couple (R[0,0,l]) x [0,0,f_b] rotated into {B}).
inline ExternalLoads external_wrench(const RigidState &state, const BlimpParams &params) {
    ExternalLoads loads;
    loads.force_world = Vec3(0.0, 0.0, params.buoyancy - params.mass * params.gravity);
    const Mat3 R = state.rotation();
    const Vec3 lever(0.0, 0.0, params.buoyancy_offset());
    loads.torque_body = lever.cross(R.transpose() * Vec3(0.0, 0.0, params.buoyancy));
    return loads;
}

/// Translational drag on the air-relative velocity; D_f acts along the body axes.
inline Vec3 drag_force(const RigidState &state, const Vec3 &wind, const BlimpParams &params) {
    const Mat3 R = state.rotation();
    const Vec3 air_body = R.transpose() * (state.velocity - wind);
    return -(R * params.drag_linear.cwiseProduct(air_body));
}

/// Advances the blimp by one semi-implicit Euler step.
///
///   m r''          = R f + f_e - D_f (r' - w) + f_extra
///   J w' + w x J w = tau + tau_e - D_tau w
///
/// Velocities update first and the new velocities drive the pose update.
/// `extra_force_world` carries environment contact forces (arena walls).
inline RigidState step(const RigidState &state, const ActuatorCommand &cmd, const Vec3 &wind,
                       const BlimpParams &params, double dt,
                       const Vec3 &extra_force_world = Vec3::Zero()) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("step: dt must be positive");
    }
    const Mat3 R = state.rotation();
    const Wrench thrust = thrust_wrench(cmd, params);
    const ExternalLoads ext = external_wrench(state, params);

    const Vec3 force = R * thrust.force + ext.force_world + drag_force(state, wind, params) +
                       extra_force_world;
    const Vec3 J = params.inertia;
    const Vec3 momentum = J.cwiseProduct(state.omega);
    const Vec3 torque = thrust.torque + ext.torque_body -
                        params.drag_angular.cwiseProduct(state.omega) -
                        state.omega.cross(momentum);

    RigidState next;
    next.velocity = state.velocity + (dt / params.mass) * force;
    next.omega = state.omega + dt * torque.cwiseQuotient(J);
    next.position = state.position + dt * next.velocity;
    next.euler = state.euler + dt * euler_rates(state.euler, next.omega);
    next.euler = next.euler.unaryExpr([](double a) { return wrap_angle(a); });

    if (!all_finite(next.position) || !all_finite(next.euler) || !all_finite(next.velocity) ||
        !all_finite(next.omega)) {
        throw NonFiniteState("step: integration produced a non-finite state");
    }
    if (std::abs(next.pitch()) > kMaxPitch) {
        throw AttitudeLimitExceeded("step: pitch exceeded 60 degrees");
    }
    return next;
}

inline double kinetic_energy(const RigidState &state, const BlimpParams &params) {
    return 0.5 * params.mass * state.velocity.squaredNorm() +
           0.5 * state.omega.dot(params.inertia.cwiseProduct(state.omega));
}

} // namespace mochi::dynamics
