// Mochi flight controller: PD height/yaw hold, visual-servo error mapping and
// feedforward "charge", composed into a body wrench and allocated to actuators.
#pragma once

#include <mochi/dynamics/rigid_body.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

namespace mochi::control {

using dynamics::ActuatorCommand;
using dynamics::BlimpParams;
using dynamics::RigidState;

/// Feedback gains. `pixel_to_yaw` and `pixel_to_height` form the diagonal of K.
struct Gains {
    double k = 0.8;               ///< height P [1/s^2]
    double k_d = 1.2;             ///< height D [1/s]
    double k_R = 1.0;             ///< yaw P [1/s^2]
    double k_Rd = 1.5;            ///< yaw D [1/s]
    double pixel_to_yaw = 0.005;  ///< [rad/px]
    double pixel_to_height = 0.008; ///< [m/px]

    void validate() const {
        if (k < 0 || k_d < 0 || k_R < 0 || k_Rd < 0) {
            throw std::invalid_argument("Gains: PD gains must be non-negative");
        }
        if (!(pixel_to_yaw > 0) || !(pixel_to_height > 0)) {
            throw std::invalid_argument("Gains: pixel conversion must be positive definite");
        }
    }
};

/// Onboard estimate: barometric height, compass heading, IMU roll/pitch.
struct SensorFeedback {
    double h = 0.0;
    double h_dot = 0.0;
    double psi = 0.0;
    double psi_dot = 0.0;
    double phi = 0.0;
    double theta = 0.0;
};

inline SensorFeedback sense(const RigidState &s) {
    const Vec3 rates = euler_rates(s.euler, s.omega);
    return {s.position.z(), s.velocity.z(), s.yaw(), rates.z(), s.roll(), s.pitch()};
}

enum class TargetKind { Balloon, Goal };

/// Pixel location the servo loop drives toward the image center.
struct ServoTarget {
    Vec2 center = Vec2::Zero(); ///< c_d [px]
    TargetKind kind = TargetKind::Balloon;
    double size = 0.0; ///< cells for balloons, pixels for goals
};

/// Operator stick input. forward in [0,1], yaw_rate and climb in [-1,1].
struct ManualCommand {
    double forward = 0.0;
    double yaw_rate = 0.0;
    double climb = 0.0;

    bool operator==(const ManualCommand &) const = default;
};

/// Full-stick accelerations for manual driving.
struct ManualLimits {
    double forward = 0.15;  ///< feedforward at forward = 1
    double yaw = 0.6;       ///< [rad/s^2]
    double climb = 0.3;     ///< [m/s^2]
};

// =============================================================================
// Pipeline stages
// =============================================================================

/// [e_psi, e_h] = K (c_f - c_d) with image u to the right and v downward:
/// a target left of center yields e_psi > 0 (turn left), above center yields e_h > 0 (climb).
inline std::pair<double, double> servo_error(const Vec2 &image_center, const ServoTarget &target,
                                             const Gains &gains) {
    const Vec2 diff = image_center - target.center;
    return {gains.pixel_to_yaw * diff.x(), gains.pixel_to_height * diff.y()};
}

/// PD law on height and yaw; returns (desired vertical accel, desired yaw accel).
inline std::pair<double, double> pd_accels(double e_h, double e_h_dot, double e_psi,
                                           double e_psi_dot, const Gains &gains) {
    return {gains.k * e_h + gains.k_d * e_h_dot, gains.k_R * e_psi + gains.k_Rd * e_psi_dot};
}

/// Fuses feedback accelerations with the forward feedforward into a body wrench:
///   f^d   = R^T (m r''^d - f_e) + r''_x [1,0,0]
///   tau^d = J w'^d + w x J w - tau_e
inline dynamics::Wrench compose_wrench(const Vec3 &accel_desired, const Vec3 &ang_accel_desired,
                                       double forward_ff, const RigidState &state,
                                       const BlimpParams &params) {
    const Mat3 R = state.rotation();
    const dynamics::ExternalLoads ext = dynamics::external_wrench(state, params);
    dynamics::Wrench w{.frame = dynamics::Frame::Body};
    w.force = R.transpose() * (params.mass * accel_desired - ext.force_world);
    w.force.x() += forward_ff;
    const Vec3 J = params.inertia;
    w.torque = J.cwiseProduct(ang_accel_desired) + state.omega.cross(J.cwiseProduct(state.omega)) -
               ext.torque_body;
    return w;
}

/// Forward feedforward once the target is close: `magnitude` iff n >= threshold.
inline double charge_trigger(double n, double threshold, double magnitude) {
    if (!(threshold > 0)) {
        throw std::invalid_argument("charge_trigger: threshold must be positive");
    }
    return n >= threshold ? magnitude : 0.0;
}

// =============================================================================
// Stateful controller
// =============================================================================

struct ControlOutput {
    ActuatorCommand command;
    bool saturated = false;
    dynamics::Wrench desired;
};

/// What the behavior layer asks of the flight controller for the current step.
struct ControlRequest {
    std::optional<ServoTarget> target;    ///< visual servo (autonomy)
    std::optional<ManualCommand> manual;  ///< operator drive
    std::optional<double> heading;        ///< absolute heading setpoint override
    std::optional<double> altitude;       ///< absolute altitude setpoint override
    double forward_ff = 0.0;              ///< cruise or charge feedforward
};

/// Height/yaw setpoint holder driving the PD loop.
///
/// Setpoints move only on retarget()/request overrides; between perception
/// frames they are constant, so the error derivatives are -h_dot and -psi_dot.
class FlightController {
  public:
    FlightController() = default;
    FlightController(double h_setpoint, double psi_setpoint)
        : h_setpoint_(h_setpoint), psi_setpoint_(psi_setpoint) {}

    double height_setpoint() const { return h_setpoint_; }
    double heading_setpoint() const { return psi_setpoint_; }
    void set_height_setpoint(double h) { h_setpoint_ = h; }
    void set_heading_setpoint(double psi) { psi_setpoint_ = wrap_angle(psi); }

    /// Converts a servo target into new setpoints: h_d = h + e_h, psi_d = psi + e_psi.
    void retarget(const SensorFeedback &fb, const ServoTarget &target, const Vec2 &image_center,
                  const Gains &gains) {
        const auto [e_psi, e_h] = servo_error(image_center, target, gains);
        h_setpoint_ = fb.h + e_h;
        psi_setpoint_ = wrap_angle(fb.psi + e_psi);
    }

    /// One control-rate update. Targets are applied through retarget() at the perception
    /// cadence; here the request only contributes overrides, manual input and feedforward.
    ControlOutput step(const SensorFeedback &fb, const ControlRequest &req, const Gains &gains,
                       const BlimpParams &params, const ManualLimits &limits = {}) {
        if (req.heading) {
            psi_setpoint_ = wrap_angle(*req.heading);
        }
        if (req.altitude) {
            h_setpoint_ = *req.altitude;
        }

        double accel_z = 0.0;
        double yaw_accel = 0.0;
        double forward = req.forward_ff;
        if (req.manual) {
            const ManualCommand &m = *req.manual;
            // Stick commands acceleration directly; setpoints follow so leaving Manual holds.
            h_setpoint_ = fb.h;
            psi_setpoint_ = fb.psi;
            accel_z = std::clamp(m.climb, -1.0, 1.0) * limits.climb + gains.k_d * (-fb.h_dot);
            yaw_accel = std::clamp(m.yaw_rate, -1.0, 1.0) * limits.yaw + gains.k_Rd * (-fb.psi_dot);
            forward += std::clamp(m.forward, 0.0, 1.0) * limits.forward;
        } else {
            const double e_h = h_setpoint_ - fb.h;
            const double e_psi = angle_diff(psi_setpoint_, fb.psi);
            std::tie(accel_z, yaw_accel) = pd_accels(e_h, -fb.h_dot, e_psi, -fb.psi_dot, gains);
        }

        RigidState attitude;
        attitude.euler = Vec3(fb.phi, fb.theta, fb.psi);
        attitude.omega = Vec3(0.0, 0.0, fb.psi_dot);
        const dynamics::Wrench desired = compose_wrench(
            Vec3(0.0, 0.0, accel_z), Vec3(0.0, 0.0, yaw_accel), forward, attitude, params);

        // Reverse thrust is unreachable, so turn by differential forward thrust.
        const double turn_floor = std::abs(desired.torque.z()) / params.arm_half_span;
        const double f_x = std::max(desired.force.x(), turn_floor);
        const dynamics::Allocation alloc =
            dynamics::allocate(f_x, desired.force.z(), desired.torque.z(), params);
        return {alloc.command, alloc.saturated, desired};
    }

  private:
    double h_setpoint_ = 0.0;
    double psi_setpoint_ = 0.0;
};

/// Single-call pipeline: servo_error -> pd_accels -> compose_wrench -> allocate.
/// With neither target nor manual command, the current setpoints are held.
inline ControlOutput controller_step(FlightController &controller, const SensorFeedback &fb,
                                     const std::optional<ServoTarget> &target,
                                     const std::optional<ManualCommand> &manual,
                                     const Gains &gains, const BlimpParams &params,
                                     const Vec2 &image_center, double forward_ff = 0.0) {
    if (target && manual) {
        throw std::invalid_argument("controller_step: target and manual are mutually exclusive");
    }
    if (target) {
        controller.retarget(fb, *target, image_center, gains);
    }
    ControlRequest req;
    req.manual = manual;
    req.forward_ff = forward_ff;
    return controller.step(fb, req, gains, params);
}

} // namespace mochi::control
