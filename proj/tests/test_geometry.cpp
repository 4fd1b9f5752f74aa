#include "slideds/geometry.hpp"

#include <cmath>
#include <gtest/gtest.h>

using namespace slideds;

TEST(ContactFrame, AxisAlignedCases) {
    auto f0 = contact_frame(0.0);
    EXPECT_DOUBLE_EQ(f0.n_hat.x(), 1.0);
    EXPECT_DOUBLE_EQ(f0.n_hat.y(), 0.0);
    EXPECT_DOUBLE_EQ(f0.t_hat.x(), 0.0);
    EXPECT_DOUBLE_EQ(f0.t_hat.y(), 1.0);

    auto f90 = contact_frame(M_PI / 2.0);
    EXPECT_NEAR(f90.n_hat.x(), 0.0, 1e-15);
    EXPECT_NEAR(f90.n_hat.y(), 1.0, 1e-15);
    EXPECT_NEAR(f90.t_hat.x(), -1.0, 1e-15);
    EXPECT_NEAR(f90.t_hat.y(), 0.0, 1e-15);
}

TEST(ContactFrame, PaperImpactAngle) {
    auto f = contact_frame(M_PI / 6.0);
    EXPECT_NEAR(f.n_hat.x(), std::sqrt(3.0) / 2.0, 1e-15);
    EXPECT_NEAR(f.n_hat.y(), 0.5, 1e-15);
    EXPECT_NEAR(f.t_hat.x(), -0.5, 1e-15);
    EXPECT_NEAR(f.t_hat.y(), std::sqrt(3.0) / 2.0, 1e-15);
}

TEST(ContactFrame, RightHandedOrthonormal) {
    for (int i = -50; i <= 50; ++i) {
        const double gamma = i * M_PI / 50.0;
        auto f = contact_frame(gamma);
        EXPECT_NEAR(f.n_hat.norm(), 1.0, 1e-12);
        EXPECT_NEAR(f.t_hat.norm(), 1.0, 1e-12);
        EXPECT_NEAR(f.n_hat.dot(f.t_hat), 0.0, 1e-12);
        // n rotated by +pi/2 is t
        EXPECT_NEAR(-f.n_hat.y(), f.t_hat.x(), 1e-12);
        EXPECT_NEAR(f.n_hat.x(), f.t_hat.y(), 1e-12);
    }
}

TEST(HullArm, CollinearCase) {
    BumperGeometry geom{0.3, 0.2};
    auto arm = hull_arm(0.0, geom);
    EXPECT_DOUBLE_EQ(arm.arm_length, 0.5);
    EXPECT_DOUBLE_EQ(arm.bearing, 0.0);
}

TEST(HullArm, LateralCase) {
    BumperGeometry geom{0.3, 0.2};
    auto arm = hull_arm(M_PI / 2.0, geom);
    EXPECT_NEAR(arm.arm_length, 0.36055512754639896, 1e-12);
    EXPECT_NEAR(arm.bearing, 0.9827937232473289, 1e-12);
}

TEST(HullArm, DegenerateCoincidentPoint) {
    BumperGeometry geom{0.3, 0.3};
    auto arm = hull_arm(M_PI, geom);
    EXPECT_NEAR(arm.arm_length, 0.0, 1e-12);
    EXPECT_EQ(arm.bearing, 0.0);
}

// Independent oracle: O^2 = l^2 + o^2 + 2 l o cos(gamma) by the law of
// cosines.
TEST(HullArm, LawOfCosinesOracle) {
    BumperGeometry geom{0.3, 0.2};
    for (int i = -100; i <= 100; ++i) {
        const double gamma = i * M_PI / 100.0;
        const double o = geom.bumper_radius, l = geom.center_offset;
        const double expected2 = l * l + o * o + 2.0 * l * o * std::cos(gamma);
        const double arm = hull_arm(gamma, geom).arm_length;
        EXPECT_NEAR(arm * arm, expected2, 1e-12) << "gamma=" << gamma;
    }
}

TEST(HullArm, ArmDerivativeMatchesFiniteDifference) {
    BumperGeometry geom{0.3, 0.2};
    const double h = 1e-7;
    for (int i = -45; i <= 45; ++i) {
        const double gamma = i * M_PI / 100.0;
        const double o = geom.bumper_radius, l = geom.center_offset;
        const double arm = hull_arm(gamma, geom).arm_length;
        const double analytic = -l * o * std::sin(gamma) / arm;
        const double fd = (hull_arm(gamma + h, geom).arm_length -
                           hull_arm(gamma - h, geom).arm_length) /
                          (2.0 * h);
        const double scale = std::max(std::abs(analytic), 1e-3);
        EXPECT_NEAR(fd, analytic, 1e-6 * scale) << "gamma=" << gamma;
    }
}

TEST(HullArm, ArmAtLeastCenterOffsetOnFrontalArc) {
    BumperGeometry geom{0.3, 0.5};
    for (int i = -50; i <= 50; ++i) {
        const double gamma = i * M_PI / 100.0;  // frontal arc
        EXPECT_GE(hull_arm(gamma, geom).arm_length + 1e-12, geom.center_offset);
    }
}

TEST(WrapAngle, RangeAndEdges) {
    EXPECT_DOUBLE_EQ(wrap_angle(0.0), 0.0);
    EXPECT_DOUBLE_EQ(wrap_angle(M_PI), M_PI);
    EXPECT_DOUBLE_EQ(wrap_angle(-M_PI), M_PI);
    EXPECT_NEAR(wrap_angle(3.0 * M_PI / 2.0), -M_PI / 2.0, 1e-12);
    for (int i = -20; i <= 20; ++i) {
        const double w = wrap_angle(i * 1.1);
        EXPECT_GT(w, -M_PI - 1e-15);
        EXPECT_LE(w, M_PI);
    }
}
