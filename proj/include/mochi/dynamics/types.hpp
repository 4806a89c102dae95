// Mochi blimp model: physical parameters, state, actuator and wrench types
#pragma once

#include <mochi/core/error.hpp>
#include <mochi/core/math.hpp>

#include <stdexcept>

namespace mochi::dynamics {

inline constexpr double kStandardGravity = 9.81;

/// Mass, inertia, drag, buoyancy and rotor geometry of one blimp.
///
/// The support arm sits `arm_offset_z` along z_B from the COM (negative = below).
/// The center of buoyancy is taken to sit `-arm_offset_z` above the COM.
struct BlimpParams {
    double mass = 0.130;                                         ///< [kg]
    Vec3 inertia = Vec3::Constant(8e-3);                         ///< diagonal of J [kg m^2]
    Vec3 drag_linear = Vec3(0.08, 0.10, 0.10);                   ///< diagonal of D_f [N s/m]
    Vec3 drag_angular = Vec3::Constant(5e-3);                    ///< diagonal of D_tau [N m s]
    double gravity = kStandardGravity;                           ///< [m/s^2]
    double buoyancy = 0.130 * kStandardGravity;                  ///< f_b [N]
    double arm_half_span = 0.35;                                 ///< d [m]
    double arm_offset_z = -0.45;                                 ///< l_b [m], signed
    double max_thrust = 0.343;                                   ///< per rotor [N]
    double servo_min = -kPi / 2.0;                               ///< [rad]
    double servo_max = kPi / 2.0;                                ///< [rad]

    /// Rotor mounting point in {B}; rotor 1 sits on +y_B, rotor 2 on -y_B.
    Vec3 rotor_position(int rotor) const {
        const double side = rotor == 1 ? 1.0 : -1.0;
        return {0.0, side * arm_half_span, arm_offset_z};
    }

    /// COM-to-center-of-buoyancy distance along z_B.
    double buoyancy_offset() const { return -arm_offset_z; }

    Mat3 inertia_matrix() const { return inertia.asDiagonal(); }

    /// Sets buoyancy so the blimp is neutrally trimmed.
    void trim_neutral() { buoyancy = mass * gravity; }

    void validate() const {
        if (!(mass > 0.0)) {
            throw std::invalid_argument("BlimpParams: mass must be positive");
        }
        if (!(inertia.minCoeff() > 0.0) || !(drag_linear.minCoeff() > 0.0) ||
            !(drag_angular.minCoeff() > 0.0)) {
            throw std::invalid_argument("BlimpParams: inertia and drag diagonals must be positive");
        }
        if (!(arm_half_span > 0.0) || !(max_thrust > 0.0)) {
            throw std::invalid_argument("BlimpParams: arm span and max thrust must be positive");
        }
        if (!(servo_min < servo_max) || servo_min < -kPi / 2.0 || servo_max > kPi / 2.0) {
            throw std::invalid_argument("BlimpParams: servo range must lie within [-pi/2, pi/2]");
        }
    }
};

/// Pose and twist. Position and linear velocity live in {W}; angular velocity in {B}.
struct RigidState {
    Vec3 position = Vec3::Zero();
    Vec3 euler = Vec3::Zero(); ///< (roll, pitch, yaw), ZYX
    Vec3 velocity = Vec3::Zero();
    Vec3 omega = Vec3::Zero();

    Mat3 rotation() const { return rotation_zyx(euler); }
    double roll() const { return euler.x(); }
    double pitch() const { return euler.y(); }
    double yaw() const { return euler.z(); }

    bool operator==(const RigidState &) const = default;
};

struct ActuatorCommand {
    double f1 = 0.0;     ///< rotor 1 thrust [N]
    double f2 = 0.0;     ///< rotor 2 thrust [N]
    double alpha1 = 0.0; ///< servo 1 tilt from x_B toward z_B [rad]
    double alpha2 = 0.0;

    bool operator==(const ActuatorCommand &) const = default;
};

enum class Frame { Body, World };

/// Force/torque pair tagged with the frame it is expressed in.
struct Wrench {
    Vec3 force = Vec3::Zero();
    Vec3 torque = Vec3::Zero();
    Frame frame = Frame::Body;

    Wrench &operator+=(const Wrench &other) {
        if (other.frame != frame) {
            throw std::logic_error("Wrench: cannot add wrenches expressed in different frames");
        }
        force += other.force;
        torque += other.torque;
        return *this;
    }
    friend Wrench operator+(Wrench a, const Wrench &b) { return a += b; }
};

/// Gravity + buoyancy. Force is in {W}; torque is in {B}.
struct ExternalLoads {
    Vec3 force_world = Vec3::Zero();
    Vec3 torque_body = Vec3::Zero();
};

} // namespace mochi::dynamics
