#include <mochi/core/error.hpp>
#include <mochi/dynamics/actuation.hpp>
#include <mochi/dynamics/rigid_body.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace mochi;
using namespace mochi::dynamics;

namespace {

// Hand-expanded p x u for p = [0, y, z], u = [ux, 0, uz].
Vec3 cross_oracle(double y, double z, double ux, double uz) {
    return {y * uz, z * ux, -y * ux};
}

// Forward model evaluated from the mounting geometry, independent of thrust_wrench.
void forward_oracle(const ActuatorCommand &c, const BlimpParams &p, Vec3 &force, Vec3 &torque) {
    const double f[2] = {c.f1, c.f2};
    const double a[2] = {c.alpha1, c.alpha2};
    const double y[2] = {p.arm_half_span, -p.arm_half_span};
    force.setZero();
    torque.setZero();
    for (int i = 0; i < 2; ++i) {
        const double ux = f[i] * std::cos(a[i]);
        const double uz = f[i] * std::sin(a[i]);
        force += Vec3(ux, 0.0, uz);
        torque += cross_oracle(y[i], p.arm_offset_z, ux, uz);
    }
}

BlimpParams params_d(double d, double lb) {
    BlimpParams p;
    p.arm_half_span = d;
    p.arm_offset_z = lb;
    return p;
}

} // namespace

TEST(ThrustWrench, ZeroCommandZeroWrench) {
    const Wrench w = thrust_wrench({}, BlimpParams{});
    EXPECT_EQ(w.force, Vec3::Zero());
    EXPECT_EQ(w.torque, Vec3::Zero());
    EXPECT_EQ(w.frame, Frame::Body);
}

TEST(ThrustWrench, ForwardThrustBelowComPitches) {
    const BlimpParams p = params_d(0.3, -0.2);
    const ActuatorCommand c{0.1, 0.1, 0.0, 0.0};
    Vec3 f, t;
    forward_oracle(c, p, f, t);
    const Wrench w = thrust_wrench(c, p);
    EXPECT_NEAR((w.force - Vec3(0.2, 0.0, 0.0)).norm(), 0.0, 1e-15);
    EXPECT_NEAR((w.torque - t).norm(), 0.0, 1e-15);
    // Only the pitch axis carries torque, with magnitude 2 * 0.1 * 0.2.
    EXPECT_NEAR(std::abs(w.torque.y()), 0.04, 1e-15);
    EXPECT_EQ(w.torque.x(), 0.0);
    EXPECT_EQ(w.torque.z(), 0.0);
}

TEST(ThrustWrench, PureLiftCancelsRoll) {
    const BlimpParams p = params_d(0.3, -0.2);
    const Wrench w = thrust_wrench({0.1, 0.1, kPi / 2, kPi / 2}, p);
    EXPECT_NEAR((w.force - Vec3(0.0, 0.0, 0.2)).norm(), 0.0, 1e-15);
    EXPECT_NEAR(w.torque.norm(), 0.0, 1e-15);
}

TEST(ThrustWrench, NeverPushesSideways) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> f(0.0, 0.343), a(-kPi / 2, kPi / 2);
    const BlimpParams p;
    for (int i = 0; i < 10000; ++i) {
        EXPECT_EQ(thrust_wrench({f(rng), f(rng), a(rng), a(rng)}, p).force.y(), 0.0);
    }
}

TEST(Wrench, AdditionRequiresMatchingFrames) {
    Wrench a{Vec3::UnitX(), Vec3::Zero(), Frame::Body};
    const Wrench b{Vec3::UnitX(), Vec3::Zero(), Frame::World};
    EXPECT_THROW(a += b, std::logic_error);
    a += Wrench{Vec3::UnitY(), Vec3::UnitZ(), Frame::Body};
    EXPECT_EQ(a.force, Vec3(1, 1, 0));
}

TEST(ExternalWrench, NeutralLevelIsZero) {
    const BlimpParams p;
    const ExternalLoads e = external_wrench(RigidState{}, p);
    EXPECT_EQ(e.force_world, Vec3::Zero());
    EXPECT_NEAR(e.torque_body.norm(), 0.0, 1e-15);
}

TEST(ExternalWrench, BuoyancyRestoresPitch) {
    BlimpParams p;
    p.arm_offset_z = -0.2; // buoyancy center 0.2 m above the COM
    for (double deg : {10.0, -10.0}) {
        RigidState s;
        s.euler.y() = deg2rad(deg);
        const ExternalLoads e = external_wrench(s, p);
        EXPECT_LT(e.torque_body.y() * s.euler.y(), 0.0) << deg;
    }
    RigidState s;
    s.euler.x() = deg2rad(10.0);
    EXPECT_LT(external_wrench(s, p).torque_body.x() * s.euler.x(), 0.0);
}

TEST(ExternalWrench, NeutralTrimFor120Grams) {
    BlimpParams p;
    p.mass = 0.120;
    p.trim_neutral();
    EXPECT_NEAR(p.buoyancy, 1.1772, 1e-12);
    EXPECT_EQ(external_wrench(RigidState{}, p).force_world.z(), 0.0);
}

TEST(Allocate, SymmetricForwardDrive) {
    const Allocation a = allocate(0.2, 0.0, 0.0, BlimpParams{});
    EXPECT_NEAR(a.command.f1, 0.1, 1e-15);
    EXPECT_NEAR(a.command.f2, 0.1, 1e-15);
    EXPECT_EQ(a.command.alpha1, 0.0);
    EXPECT_EQ(a.command.alpha2, 0.0);
    EXPECT_FALSE(a.saturated);
}

TEST(Allocate, PureLift) {
    const Allocation a = allocate(0.0, 0.2, 0.0, BlimpParams{});
    EXPECT_NEAR(a.command.f1, 0.1, 1e-15);
    EXPECT_NEAR(a.command.f2, 0.1, 1e-15);
    EXPECT_NEAR(a.command.alpha1, kPi / 2, 1e-15);
    EXPECT_NEAR(a.command.alpha2, kPi / 2, 1e-15);
}

TEST(Allocate, MixedCommandRoundTrips) {
    const BlimpParams p = params_d(0.3, -0.45);
    const Allocation a = allocate(0.1, 0.05, 0.01, p);
    EXPECT_NEAR(a.command.f1, 0.0416667, 1e-6);
    EXPECT_NEAR(rad2deg(a.command.alpha1), 36.87, 5e-3);
    EXPECT_NEAR(a.command.f2, 0.0712, 1e-4);
    EXPECT_NEAR(rad2deg(a.command.alpha2), 20.56, 5e-3);
    Vec3 f, t;
    forward_oracle(a.command, p, f, t);
    EXPECT_NEAR(f.x(), 0.1, 1e-9);
    EXPECT_NEAR(f.z(), 0.05, 1e-9);
    EXPECT_NEAR(t.z(), 0.01, 1e-9);
}

TEST(Allocate, RoundTripInsideEnvelope) {
    const BlimpParams p;
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> fx(0.0, 0.3), fz(-0.2, 0.2), tz(-0.03, 0.03);
    int checked = 0;
    for (int i = 0; i < 20000; ++i) {
        const double x = fx(rng), z = fz(rng), tau = tz(rng);
        const Allocation a = allocate(x, z, tau, p);
        if (a.saturated) {
            continue;
        }
        ++checked;
        Vec3 f, t;
        forward_oracle(a.command, p, f, t);
        ASSERT_NEAR(f.x(), x, 1e-9);
        ASSERT_NEAR(f.z(), z, 1e-9);
        ASSERT_NEAR(t.z(), tau, 1e-9);
        const Wrench w = thrust_wrench(a.command, p);
        ASSERT_NEAR(w.force.x(), x, 1e-9);
        ASSERT_NEAR(w.torque.z(), tau, 1e-9);
    }
    EXPECT_GT(checked, 10000);
}

TEST(Allocate, SaturationClampsThrustThenTilt) {
    const BlimpParams p;
    const Allocation big = allocate(2.0, 0.0, 0.0, p);
    EXPECT_TRUE(big.saturated);
    EXPECT_EQ(big.command.f1, p.max_thrust);
    EXPECT_EQ(big.command.f2, p.max_thrust);
    // A rotor asked to push backwards is tilt-limited, not rescaled.
    const Allocation back = allocate(-0.1, 0.0, 0.0, p);
    EXPECT_TRUE(back.saturated);
    EXPECT_LE(std::abs(back.command.alpha1), kPi / 2);
    EXPECT_NEAR(back.command.f1, 0.05, 1e-15);
}

TEST(Step, NeutralEquilibriumIsBitExact) {
    const BlimpParams p;
    RigidState s;
    s.position = Vec3(3.0, -2.0, 4.0);
    s.euler.z() = 0.7;
    RigidState x = s;
    for (int i = 0; i < 10000; ++i) {
        x = step(x, {}, Vec3::Zero(), p, 0.005);
    }
    EXPECT_EQ(x, s);
}

TEST(Step, TerminalForwardSpeed) {
    const BlimpParams p;
    RigidState s;
    const ActuatorCommand c{0.05, 0.05, 0.0, 0.0};
    for (int i = 0; i < 20000; ++i) {
        s = step(s, c, Vec3::Zero(), p, 0.005);
    }
    // Thrust below the COM pitches the body a little; compare along the body axis.
    const double v_body = (s.rotation().transpose() * s.velocity).x();
    const double expected = 0.1 / p.drag_linear.x();
    EXPECT_NEAR(v_body, expected, 0.02 * expected);
}

TEST(Step, DriftsWithSteadyWind) {
    const BlimpParams p;
    const Vec3 w(0.4, -0.3, 0.0);
    RigidState s;
    for (int i = 0; i < 20000; ++i) {
        s = step(s, {}, w, p, 0.005);
    }
    EXPECT_LT((s.velocity - w).norm(), 1e-6);
}

TEST(Step, Errors) {
    const BlimpParams p;
    RigidState s;
    EXPECT_THROW(step(s, {}, Vec3::Zero(), p, 0.0), std::invalid_argument);
    RigidState bad = s;
    bad.velocity.x() = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(step(bad, {}, Vec3::Zero(), p, 0.005), NonFiniteState);
    RigidState tilted = s;
    tilted.euler.y() = deg2rad(59.99);
    tilted.omega.y() = 10.0;
    EXPECT_THROW(step(tilted, {}, Vec3::Zero(), p, 0.005), AttitudeLimitExceeded);
}

TEST(Step, DragDissipatesEnergy) {
    const BlimpParams p;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        RigidState s;
        s.velocity = Vec3(u(rng), u(rng), u(rng));
        s.omega = Vec3(0.2 * u(rng), 0.2 * u(rng), u(rng));
        s.euler = Vec3(0.1 * u(rng), 0.1 * u(rng), 3.0 * u(rng));
        // Gravity/buoyancy torque exchanges energy with the pendulum mode; remove it to
        // isolate drag.
        BlimpParams q = p;
        q.arm_offset_z = 0.0;
        for (double dt : {0.005, 0.001}) {
            RigidState x = s;
            double e = kinetic_energy(x, q);
            for (int i = 0; i < 400; ++i) {
                x = step(x, {}, Vec3::Zero(), q, dt);
                const double e2 = kinetic_energy(x, q);
                ASSERT_LE(e2, e + 1e-15);
                e = e2;
            }
        }
    }
}

TEST(Step, FirstOrderConvergence) {
    const BlimpParams p;
    const ActuatorCommand c{0.08, 0.05, 0.3, 0.6};
    RigidState s0;
    s0.position = Vec3(1.0, 2.0, 3.0);
    s0.omega = Vec3(0.05, -0.02, 0.3);
    s0.velocity = Vec3(0.2, 0.0, 0.1);
    const auto endpoint = [&](double dt) {
        RigidState s = s0;
        const int n = static_cast<int>(std::llround(10.0 / dt));
        for (int i = 0; i < n; ++i) {
            s = step(s, c, Vec3(0.1, 0.0, 0.0), p, dt);
        }
        return s.position;
    };
    const Vec3 a = endpoint(0.01), b = endpoint(0.005), c2 = endpoint(0.0025), d = endpoint(0.00125);
    const double r1 = (a - b).norm() / (b - c2).norm();
    const double r2 = (b - c2).norm() / (c2 - d).norm();
    EXPECT_GE(r1, 1.5);
    EXPECT_LE(r1, 3.0);
    EXPECT_GE(r2, 1.5);
    EXPECT_LE(r2, 3.0);
}

TEST(BlimpParams, Validation) {
    BlimpParams p;
    EXPECT_NO_THROW(p.validate());
    p.mass = 0.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = BlimpParams{};
    p.servo_max = kPi;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = BlimpParams{};
    p.drag_linear.y() = 0.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}
