#pragma once

#include <string>
#include <vector>

#include "koord/vec3.hpp"

namespace koord::motion {

enum class VehicleKind { Car, Quad };

std::string to_string(VehicleKind k);
VehicleKind parse_vehicle_kind(const std::string& s);

struct Pose {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double yaw = 0.0;

    Vec3 position() const { return {x, y, z}; }
};

/// Maps an angle into (-pi, pi].
double normalize_angle(double a);

struct VehicleModel {
    VehicleKind kind = VehicleKind::Car;
    double wheelbase = 0.3;
    double v_max = 1.0;
    double steer_max = 0.6;
    double accel = 1.0;  // car only, m/s^2
    double eps_reach = 0.1;

    /// Throws std::invalid_argument when a parameter is out of range.
    void validate() const;
    double lookahead() const;
    double min_turn_radius() const;
};

struct MotionState {
    Pose pose;
    double speed = 0.0;  // signed; negative while reversing
    std::vector<Vec3> route;
    std::size_t cursor = 0;  // index of the waypoint ending the current leg
    Vec3 anchor;             // where the route was set; start of the first leg
    bool reached = true;
    bool reversing = false;
};

/// Replaces the route. Throws std::invalid_argument on an empty route or a
/// car waypoint off the ground plane.
void set_route(MotionState& s, const VehicleModel& m, std::vector<Vec3> waypoints);

void step(MotionState& s, const VehicleModel& m, double dt);

/// One explicit-Euler step of the kinematic bicycle.
Pose bicycle_step(const Pose& p, double v, double steer, double wheelbase, double dt);

struct Ports {
    Pose psn;
    bool reached = true;
};

inline Ports read_ports(const MotionState& s) {
    return {s.pose, s.reached};
}

} // namespace koord::motion
