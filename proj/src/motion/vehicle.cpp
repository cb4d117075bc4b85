#include "koord/motion/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace koord::motion {

std::string to_string(VehicleKind k) {
    return k == VehicleKind::Car ? "CAR" : "QUAD";
}

VehicleKind parse_vehicle_kind(const std::string& s) {
    if (s == "CAR") return VehicleKind::Car;
    if (s == "QUAD") return VehicleKind::Quad;
    throw std::invalid_argument("unknown bot_type '" + s + "' (expected CAR or QUAD)");
}

double normalize_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a <= -std::numbers::pi) a += two_pi;
    if (a > std::numbers::pi) a -= two_pi;
    return a;
}

void VehicleModel::validate() const {
    if (!(v_max > 0.0)) throw std::invalid_argument("v_max must be positive");
    if (!(eps_reach > 0.0)) throw std::invalid_argument("eps_reach must be positive");
    if (kind == VehicleKind::Car) {
        if (!(wheelbase > 0.0)) throw std::invalid_argument("wheelbase must be positive");
        if (!(steer_max > 0.0 && steer_max < std::numbers::pi / 2)) throw std::invalid_argument("steer_max must be in (0, pi/2)");
        if (!(accel > 0.0)) throw std::invalid_argument("accel must be positive");
    }
}

double VehicleModel::lookahead() const {
    return kind == VehicleKind::Car ? std::max(wheelbase, 2.0 * eps_reach) : eps_reach;
}

double VehicleModel::min_turn_radius() const {
    return wheelbase / std::tan(steer_max);
}

void set_route(MotionState& s, const VehicleModel& m, std::vector<Vec3> waypoints) {
    if (waypoints.empty()) throw std::invalid_argument("route must not be empty");
    if (m.kind == VehicleKind::Car) {
        for (const auto& w : waypoints) {
            if (w.z != 0.0) throw std::invalid_argument(fmt::format("car route waypoint has z = {}", w.z));
        }
    }
    s.route = std::move(waypoints);
    s.cursor = 0;
    s.anchor = s.pose.position();
    s.reversing = false;
    s.reached = false;
}

Pose bicycle_step(const Pose& p, double v, double steer, double wheelbase, double dt) {
    Pose out = p;
    out.x += v * std::cos(p.yaw) * dt;
    out.y += v * std::sin(p.yaw) * dt;
    out.yaw = normalize_angle(p.yaw + v / wheelbase * std::tan(steer) * dt);
    return out;
}

namespace {

Vec3 flat(Vec3 v) {
    return {v.x, v.y, 0.0};
}

void step_quad(MotionState& s, const VehicleModel& m, double dt) {
    Vec3 here = s.pose.position();
    while (s.cursor + 1 < s.route.size() && distance(here, s.route[s.cursor]) <= m.eps_reach) ++s.cursor;
    Vec3 to = s.route[s.cursor] - here;
    double d = norm(to);
    double move = std::min(m.v_max * dt, d);
    s.speed = move / dt;
    if (d > 0.0) {
        Vec3 next = here + to * (move / d);
        s.pose.x = next.x;
        s.pose.y = next.y;
        s.pose.z = next.z;
    }
}

Vec3 leg_start(const MotionState& s, std::size_t i) {
    return flat(i == 0 ? s.anchor : s.route[i - 1]);
}

// Closest point on leg i and its distance along that leg.
Vec3 project(Vec3 p, Vec3 a, Vec3 b, double* along) {
    Vec3 ab = b - a;
    double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
    *along = t * std::sqrt(len2);
    return a + ab * t;
}

// Pure pursuit on a carrot `look` metres down the route from the closest
// point; the search window only moves forward.
void step_car(MotionState& s, const VehicleModel& m, double dt) {
    Vec3 here = flat(s.pose.position());
    const double look = m.lookahead();

    std::size_t best = s.cursor;
    double best_d = std::numeric_limits<double>::infinity();
    double best_along = 0.0;
    double scanned = 0.0;
    for (std::size_t i = s.cursor; i < s.route.size(); ++i) {
        Vec3 a = leg_start(s, i);
        Vec3 b = flat(s.route[i]);
        double along = 0.0;
        double d = distance(here, project(here, a, b, &along));
        if (d < best_d - 1e-9) {
            best_d = d;
            best = i;
            best_along = along;
        }
        scanned += distance(a, b) - (i == s.cursor ? along : 0.0);
        if (scanned > 2.0 * look + best_d) break;
    }
    s.cursor = best;

    // walk `look` metres from the projection
    Vec3 target = flat(s.route.back());
    double left = look;
    double rem = 0.0;
    bool placed = false;
    for (std::size_t i = s.cursor; i < s.route.size(); ++i) {
        Vec3 a = leg_start(s, i);
        Vec3 b = flat(s.route[i]);
        double len = distance(a, b);
        double from = i == s.cursor ? best_along : 0.0;
        double avail = len - from;
        rem += avail;
        if (!placed && avail >= left && len > 0.0) {
            target = a + (b - a) * ((from + left) / len);
            placed = true;
        } else if (!placed) {
            left -= avail;
        }
    }
    rem = std::max(rem, distance(here, flat(s.route.back())));

    double dx = target.x - here.x;
    double dy = target.y - here.y;
    double c = std::cos(s.pose.yaw);
    double sn = std::sin(s.pose.yaw);
    double lx = c * dx + sn * dy;
    double ly = -sn * dx + c * dy;
    double d = std::hypot(lx, ly);

    // a target inside the turning circle on its side is out of reach going forward
    const double r_min = m.min_turn_radius();
    const double centre_dist = std::hypot(lx, ly - std::copysign(r_min, ly));
    const bool inside = centre_dist < r_min;

    // hysteresis keeps the gear from chattering when the target is abeam
    if (!s.reversing && (lx < -0.25 * d || inside)) s.reversing = true;
    if (s.reversing && lx > 0.25 * d && centre_dist > 1.1 * r_min) s.reversing = false;

    double steer = 0.0;
    if (d > 1e-9 && !(s.reversing && lx > 0.0)) {
        double kappa = 2.0 * ly / (d * d);
        steer = std::clamp(std::atan(kappa * m.wheelbase), -m.steer_max, m.steer_max);
    }

    double target_speed = std::min(m.v_max, std::sqrt(2.0 * m.accel * rem));
    if (s.reversing) target_speed = -target_speed;
    double dv = std::clamp(target_speed - s.speed, -m.accel * dt, m.accel * dt);
    s.speed = std::clamp(s.speed + dv, -m.v_max, m.v_max);

    s.pose = bicycle_step(s.pose, s.speed, steer, m.wheelbase, dt);
    s.pose.z = 0.0;
}

} // namespace

void step(MotionState& s, const VehicleModel& m, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (s.reached || s.route.empty()) {
        s.reached = true;
        s.speed = 0.0;
        return;
    }
    Vec3 here = s.pose.position();
    Vec3 goal = s.route.back();
    if (m.kind == VehicleKind::Car) {
        here = flat(here);
        goal = flat(goal);
    }
    if (distance(here, goal) <= m.eps_reach) {
        s.reached = true;
        s.speed = 0.0;
        s.cursor = s.route.size() - 1;
        return;
    }
    if (m.kind == VehicleKind::Quad) {
        step_quad(s, m, dt);
    } else {
        step_car(s, m, dt);
    }
}

} // namespace koord::motion
