#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "koord/motion/vehicle.hpp"

using namespace koord;
using namespace koord::motion;

namespace {

VehicleModel car() {
    VehicleModel m;
    m.kind = VehicleKind::Car;
    return m;
}

VehicleModel quad() {
    VehicleModel m;
    m.kind = VehicleKind::Quad;
    return m;
}

// Steps until reached or the time budget runs out; returns elapsed time.
double run_until_reached(MotionState& s, const VehicleModel& m, double dt, double budget) {
    double t = 0.0;
    while (!s.reached && t < budget) {
        step(s, m, dt);
        t += dt;
    }
    return t;
}

} // namespace

TEST(Motion, NormalizeAngle) {
    EXPECT_DOUBLE_EQ(normalize_angle(std::numbers::pi), std::numbers::pi);
    EXPECT_DOUBLE_EQ(normalize_angle(-std::numbers::pi), std::numbers::pi);
    EXPECT_NEAR(normalize_angle(3 * std::numbers::pi / 2), -std::numbers::pi / 2, 1e-12);
    EXPECT_NEAR(normalize_angle(0.25 + 6 * std::numbers::pi), 0.25, 1e-9);
}

TEST(Motion, FreshStateReadsOriginReached) {
    MotionState s;
    auto p = read_ports(s);
    EXPECT_EQ(p.psn.x, 0.0);
    EXPECT_EQ(p.psn.y, 0.0);
    EXPECT_EQ(p.psn.z, 0.0);
    EXPECT_EQ(p.psn.yaw, 0.0);
    EXPECT_TRUE(p.reached);
}

TEST(Motion, SetRouteResets) {
    MotionState s;
    set_route(s, quad(), {{1, 1, 1}});
    EXPECT_FALSE(s.reached);
    EXPECT_EQ(s.cursor, 0u);
    EXPECT_THROW(set_route(s, car(), {{1, 1, 2}}), std::invalid_argument);
    EXPECT_THROW(set_route(s, quad(), {}), std::invalid_argument);
}

TEST(Motion, DegenerateRouteReachedAfterFirstStep) {
    MotionState s;
    s.pose = {1, 1, 0, 0};
    set_route(s, car(), {{1.05, 1, 0}});
    step(s, car(), 0.01);
    EXPECT_TRUE(s.reached);
}

TEST(Motion, QuadStraightLineStep) {
    MotionState s;
    set_route(s, quad(), {{0, 0, 1}});
    step(s, quad(), 0.1);
    EXPECT_NEAR(s.pose.x, 0.0, 1e-12);
    EXPECT_NEAR(s.pose.y, 0.0, 1e-12);
    EXPECT_NEAR(s.pose.z, 0.1, 1e-12);
}

TEST(Motion, BicycleStraight) {
    Pose p = bicycle_step({0, 0, 0, 0}, 1.0, 0.0, 0.3, 0.1);
    EXPECT_NEAR(p.x, 0.1, 1e-12);
    EXPECT_NEAR(p.y, 0.0, 1e-12);
    EXPECT_EQ(p.yaw, 0.0);
}

TEST(Motion, CarReachesWaypointBehind) {
    for (double dist : {0.5, 1.0, 2.0, 3.0}) {
        for (double off : {-0.4, 0.0, 0.3}) {
            MotionState s;
            set_route(s, car(), {{-dist, off, 0}});
            double t = run_until_reached(s, car(), 0.01, 60.0);
            EXPECT_TRUE(s.reached) << dist << " " << off;
            EXPECT_LT(t, 60.0);
            EXPECT_LE(std::hypot(s.pose.x + dist, s.pose.y - off), car().eps_reach + 1e-9);
        }
    }
}

TEST(Motion, ThreeWaypointRoute) {
    for (auto m : {car(), quad()}) {
        MotionState s;
        std::vector<Vec3> r{{1, 0, 0}, {2, 1, 0}, {2, 2, 0}};
        set_route(s, m, r);
        run_until_reached(s, m, 0.01, 60.0);
        EXPECT_TRUE(s.reached);
        EXPECT_LE(distance(s.pose.position(), r.back()), m.eps_reach + 1e-9);
    }
}

TEST(Motion, MidRouteNotReached) {
    MotionState s;
    set_route(s, quad(), {{5, 0, 0}});
    for (int i = 0; i < 10; ++i) step(s, quad(), 0.01);
    EXPECT_FALSE(read_ports(s).reached);
}

TEST(Motion, RandomRoutesRespectContracts) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (auto m : {car(), quad()}) {
        for (int trial = 0; trial < 30; ++trial) {
            MotionState s;
            s.pose = {0, 0, 0, u(rng)};
            std::vector<Vec3> route;
            for (int k = 0; k < 3; ++k) route.push_back({u(rng), u(rng), m.kind == VehicleKind::Car ? 0.0 : std::abs(u(rng))});
            set_route(s, m, route);
            const double dt = 0.01;
            double t = 0.0;
            bool latched = false;
            double prev_cursor_dist = 1e9;
            std::size_t prev_cursor = 0;
            while (t < 120.0) {
                Vec3 before = s.pose.position();
                step(s, m, dt);
                t += dt;
                Vec3 after = s.pose.position();
                EXPECT_LE(distance(before, after), m.v_max * dt + 1e-9);
                if (m.kind == VehicleKind::Car) EXPECT_EQ(s.pose.z, 0.0);
                if (m.kind == VehicleKind::Quad && !s.reached) {
                    double d = distance(after, s.route[s.cursor]);
                    if (s.cursor == prev_cursor) EXPECT_LE(d, prev_cursor_dist + 1e-12);
                    prev_cursor = s.cursor;
                    prev_cursor_dist = d;
                }
                if (latched) EXPECT_TRUE(s.reached);
                latched = latched || s.reached;
                if (latched && t > 1.0 + 60.0) break;
            }
            EXPECT_TRUE(s.reached) << to_string(m.kind) << " trial " << trial;
        }
    }
}
