#include <mochi/sim/events.hpp>

#include <gtest/gtest.h>

using namespace mochi;
using namespace mochi::sim;

namespace {

dynamics::RigidState moving(double speed, double yaw = 0.0) {
    dynamics::RigidState s;
    s.position = Vec3(5.0, 5.0, 2.2);
    s.euler.z() = yaw;
    s.velocity = speed * Vec3(std::cos(yaw), std::sin(yaw), 0.0);
    return s;
}

HoopSpec hoop() {
    HoopSpec h;
    h.center = Vec3(10.0, 10.0, 5.5);
    h.yaw = 0.0; // normal along +x
    return h;
}

} // namespace

TEST(Capture, Rules) {
    const CaptureGeometry g;
    const Vec3 in_net(5.1, 5.0, 1.5);
    EXPECT_FALSE(check_capture(moving(0.2), Vec3(10.0, 5.0, 1.5), g));
    EXPECT_TRUE(check_capture(moving(0.2), in_net, g));
    EXPECT_FALSE(check_capture(moving(0.05), in_net, g));
    EXPECT_FALSE(check_capture(moving(-0.2), in_net, g));
}

TEST(Capture, CylinderBoundary) {
    const CaptureGeometry g;
    const auto s = moving(0.3, 1.0);
    const Vec3 c = s.position - Vec3(0.0, 0.0, 0.7);
    EXPECT_TRUE(inside_net(s, c + Vec3(0.3, 0.0, 0.0), g));
    EXPECT_FALSE(inside_net(s, c + Vec3(0.31, 0.0, 0.0), g));
    EXPECT_TRUE(inside_net(s, c + Vec3(0.0, 0.0, 0.25), g));
    EXPECT_FALSE(inside_net(s, c + Vec3(0.0, 0.0, 0.26), g));
    EXPECT_FALSE(inside_net(s, c + Vec3(0.0, 0.0, -0.26), g));
}

TEST(Delivery, PassThrough) {
    const CaptureGeometry g;
    const HoopSpec h = hoop();
    // Step across the plane 0.5 m off-center; neither endpoint is within the contact margin.
    const Vec3 prev = h.center + Vec3(-1.2, 0.5, 0.0);
    const Vec3 cur = h.center + Vec3(1.2, 0.5, 0.0);
    EXPECT_TRUE(check_delivery(prev, cur, true, h, g));
    EXPECT_FALSE(check_delivery(prev, cur, false, h, g));
    // Crossing outside the aperture.
    EXPECT_FALSE(check_delivery(h.center + Vec3(-1.2, 1.2, 0.0), h.center + Vec3(1.2, 1.2, 0.0), true, h, g));
}

TEST(Delivery, ContactNearTheRim) {
    const CaptureGeometry g;
    const HoopSpec h = hoop();
    // In the hoop plane, 0.2 m outside the rim: contact, no pass.
    const Vec3 p = h.center + Vec3(0.0, 0.95, 0.0);
    EXPECT_TRUE(check_delivery(p, p, true, h, g));
    const Vec3 far = h.center + Vec3(0.0, 1.1, 0.0);
    EXPECT_FALSE(check_delivery(far, far, true, h, g));
}
