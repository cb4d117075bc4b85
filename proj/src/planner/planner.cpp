#include "koord/planner/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

namespace koord::planner {

bool Workspace::free(const Vec3& p) const {
    if (!bounds.contains(p)) return false;
    return std::none_of(obstacles.begin(), obstacles.end(), [&](const Box& b) { return b.contains(p); });
}

namespace {

// Slab test: does the closed segment [a,b] touch the closed box?
bool segment_hits_box(const Vec3& a, const Vec3& b, const Box& box) {
    double t0 = 0.0;
    double t1 = 1.0;
    const double as[3] = {a.x, a.y, a.z};
    const double ds[3] = {b.x - a.x, b.y - a.y, b.z - a.z};
    const double lo[3] = {box.lo.x, box.lo.y, box.lo.z};
    const double hi[3] = {box.hi.x, box.hi.y, box.hi.z};
    for (int k = 0; k < 3; ++k) {
        if (std::abs(ds[k]) < 1e-15) {
            if (as[k] < lo[k] || as[k] > hi[k]) return false;
            continue;
        }
        double u = (lo[k] - as[k]) / ds[k];
        double v = (hi[k] - as[k]) / ds[k];
        if (u > v) std::swap(u, v);
        t0 = std::max(t0, u);
        t1 = std::min(t1, v);
        if (t0 > t1) return false;
    }
    return true;
}

} // namespace

bool Workspace::segment_free(const Vec3& a, const Vec3& b) const {
    // the bounds are convex, so checking the ends suffices for them
    if (!bounds.contains(a) || !bounds.contains(b)) return false;
    for (const auto& box : obstacles) {
        if (segment_hits_box(a, b, box)) return false;
    }
    return true;
}

std::string to_string(PlannerKind k) {
    switch (k) {
        case PlannerKind::RrtCar: return "RRT_CAR";
        case PlannerKind::RrtQuad: return "RRT_QUAD";
        case PlannerKind::RrtSmoothCar: return "RRT_SMOOTH_CAR";
        case PlannerKind::RrtSmoothQuad: return "RRT_SMOOTH_QUAD";
    }
    return "?";
}

PlannerKind parse_planner_kind(const std::string& s) {
    for (auto k : {PlannerKind::RrtCar, PlannerKind::RrtQuad, PlannerKind::RrtSmoothCar, PlannerKind::RrtSmoothQuad}) {
        if (to_string(k) == s) return k;
    }
    throw std::invalid_argument("unknown planner '" + s + "'");
}

PathKind path_kind(PlannerKind k) {
    return k == PlannerKind::RrtCar || k == PlannerKind::RrtSmoothCar ? PathKind::Car : PathKind::Quad;
}

bool smooths(PlannerKind k) {
    return k == PlannerKind::RrtSmoothCar || k == PlannerKind::RrtSmoothQuad;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    // splitmix64 finaliser over the combined value
    std::uint64_t z = a * 0x9E3779B97F4A7C15ull + b + 0x632BE59BD9B4E019ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

namespace {

void check_endpoint(const char* what, const Vec3& p, const Workspace& ws, PathKind kind) {
    if (!ws.bounds.contains(p)) throw std::invalid_argument(fmt::format("{} ({}, {}, {}) is outside the workspace", what, p.x, p.y, p.z));
    if (!ws.free(p)) throw std::invalid_argument(fmt::format("{} ({}, {}, {}) is inside an obstacle", what, p.x, p.y, p.z));
    if (kind == PathKind::Car && p.z != 0.0) throw std::invalid_argument(fmt::format("{} for a car must have z = 0", what));
}

bool edge_ok(const Vec3& a, const Vec3& b, const Workspace& ws, const EdgeCheck& extra) {
    return ws.segment_free(a, b) && (!extra || extra(a, b));
}

} // namespace

std::optional<Path> rrt_plan(const Vec3& start, const Vec3& goal, const Workspace& ws, PathKind kind, std::uint64_t seed,
                             const RrtParams& params, const EdgeCheck& extra) {
    check_endpoint("start", start, ws, kind);
    check_endpoint("goal", goal, ws, kind);
    if (distance(start, goal) < 1e-9) return Path{start};
    if (distance(start, goal) <= params.step && edge_ok(start, goal, ws, extra)) return Path{start, goal};

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Box& bb = ws.bounds;
    auto sample = [&]() -> Vec3 {
        if (unit(rng) < params.goal_bias) return goal;
        Vec3 p{bb.lo.x + (bb.hi.x - bb.lo.x) * unit(rng), bb.lo.y + (bb.hi.y - bb.lo.y) * unit(rng), 0.0};
        double z = bb.lo.z + (bb.hi.z - bb.lo.z) * unit(rng);
        if (kind == PathKind::Quad) p.z = z;
        return p;
    };

    std::vector<Vec3> nodes{start};
    std::vector<int> parent{-1};
    nodes.reserve(static_cast<std::size_t>(params.max_iters) + 2);
    for (int it = 0; it < params.max_iters; ++it) {
        Vec3 s = sample();
        std::size_t near = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            Vec3 d = nodes[i] - s;
            double dd = dot(d, d);
            if (dd < best) {
                best = dd;
                near = i;
            }
        }
        best = std::sqrt(best);
        if (best < 1e-9) continue;
        Vec3 q = best <= params.step ? s : nodes[near] + (s - nodes[near]) * (params.step / best);
        if (!edge_ok(nodes[near], q, ws, extra)) continue;
        nodes.push_back(q);
        parent.push_back(static_cast<int>(near));
        int last = static_cast<int>(nodes.size()) - 1;
        if (distance(q, goal) < 1e-9 || (distance(q, goal) <= params.step && edge_ok(q, goal, ws, extra))) {
            if (distance(q, goal) >= 1e-9) {
                nodes.push_back(goal);
                parent.push_back(last);
                last = static_cast<int>(nodes.size()) - 1;
            }
            Path path;
            for (int i = last; i >= 0; i = parent[static_cast<std::size_t>(i)]) path.push_back(nodes[static_cast<std::size_t>(i)]);
            std::reverse(path.begin(), path.end());
            return path;
        }
    }
    return std::nullopt;
}

Path smooth(const Path& path, const Workspace& ws, std::uint64_t seed, int rounds, const EdgeCheck& extra) {
    Path p = path;
    std::mt19937_64 rng(seed);
    for (int r = 0; r < rounds && p.size() > 2; ++r) {
        std::uniform_int_distribution<std::size_t> pick(0, p.size() - 1);
        std::size_t i = pick(rng);
        std::size_t j = pick(rng);
        if (i > j) std::swap(i, j);
        if (j < i + 2) continue;
        if (edge_ok(p[i], p[j], ws, extra)) p.erase(p.begin() + static_cast<std::ptrdiff_t>(i + 1), p.begin() + static_cast<std::ptrdiff_t>(j));
    }
    return p;
}

bool path_is_clear(const Path& path, const std::vector<Reservation>& reservations, const std::vector<Vec3>& positions,
                   double d_s) {
    const double limit = 2.0 * d_s;
    for (const auto& r : reservations) {
        if (!r.active || r.path.empty()) continue;
        if (polyline_distance(path, r.path) < limit) return false;
    }
    for (const auto& p : positions) {
        if (polyline_distance(path, {p}) < limit) return false;
    }
    return true;
}

Path heading_arc(const motion::Pose& start, const Vec3& goal, const motion::VehicleModel& car) {
    constexpr double kAligned = 20.0 * std::numbers::pi / 180.0;
    constexpr double kStep = 0.1;  // radians between arc samples
    const double radius = 1.2 * car.min_turn_radius();
    auto bearing_error = [&](double x, double y, double yaw) {
        return motion::normalize_angle(std::atan2(goal.y - y, goal.x - x) - yaw);
    };
    double err = bearing_error(start.x, start.y, start.yaw);
    if (std::abs(err) <= kAligned) return {};
    double side = err > 0 ? 1.0 : -1.0;
    double cx = start.x - side * radius * std::sin(start.yaw);
    double cy = start.y + side * radius * std::cos(start.yaw);
    if (std::hypot(goal.x - cx, goal.y - cy) <= radius) return {};

    Path arc;
    double yaw = start.yaw;
    for (double swept = kStep; swept < 2.0 * std::numbers::pi; swept += kStep) {
        yaw = start.yaw + side * swept;
        double x = cx + side * radius * std::sin(yaw);
        double y = cy - side * radius * std::cos(yaw);
        arc.push_back({x, y, 0.0});
        if (std::abs(bearing_error(x, y, yaw)) <= kAligned / 2) break;
    }
    return arc;
}

Rollout car_rollout(const Path& path, const motion::Pose& start, const motion::VehicleModel& car, double dt) {
    Rollout out;
    if (path.empty() || !(dt > 0.0)) return out;
    motion::MotionState s;
    s.pose = start;
    s.pose.z = 0.0;
    motion::set_route(s, car, path);
    Path poly{s.pose.position()};
    poly.insert(poly.end(), path.begin(), path.end());
    const double budget = 3.0 * path_length(poly) / car.v_max + 20.0;
    out.trace.push_back(s.pose.position());
    for (double t = 0.0; t <= budget; t += dt) {
        motion::step(s, car, dt);
        if (s.reached) {
            out.arrived = true;
            break;
        }
        Vec3 p = s.pose.position();
        out.trace.push_back(p);
        double d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < poly.size(); ++i) d = std::min(d, point_segment_distance(p, poly[i - 1], poly[i]));
        out.max_deviation = std::max(out.max_deviation, d);
    }
    return out;
}

std::optional<Path> find_path(const FindPathRequest& req, const Workspace& ws) {
    const PathKind kind = path_kind(req.kind);
    Vec3 start = req.start.position();
    if (kind == PathKind::Car) start.z = 0.0;
    check_endpoint("start", start, ws, kind);
    check_endpoint("goal", req.goal, ws, kind);

    std::vector<Reservation> others;
    for (const auto& r : req.reservations) {
        if (r.pid != req.pid && r.active && !r.path.empty()) others.push_back(r);
    }
    const double limit = 2.0 * ws.d_s;
    EdgeCheck clear = [&](const Vec3& a, const Vec3& b) {
        Path seg{a, b};
        for (const auto& r : others) {
            if (polyline_distance(seg, r.path) < limit) return false;
        }
        for (const auto& p : req.positions) {
            if (point_segment_distance(p, a, b) < limit) return false;
        }
        return true;
    };
    // a path always contains both endpoints
    if (!clear(start, start) || !clear(req.goal, req.goal)) return std::nullopt;

    Path prefix{start};
    if (kind == PathKind::Car && req.vehicle.kind == motion::VehicleKind::Car) {
        Path arc = heading_arc(req.start, req.goal, req.vehicle);
        Vec3 prev = start;
        bool ok = !arc.empty();
        for (const auto& p : arc) {
            if (!edge_ok(prev, p, ws, clear)) {
                ok = false;
                break;
            }
            prev = p;
        }
        if (ok) prefix.insert(prefix.end(), arc.begin(), arc.end());
    }

    for (int attempt = 0; attempt < req.attempts; ++attempt) {
        std::uint64_t seed = mix_seed(req.seed, static_cast<std::uint64_t>(attempt));
        auto body = rrt_plan(prefix.back(), req.goal, ws, kind, seed, req.params, clear);
        if (!body) continue;
        if (smooths(req.kind)) *body = smooth(*body, ws, mix_seed(seed, 1), req.params.smooth_rounds, clear);
        Path path(prefix.begin(), prefix.end() - 1);
        path.insert(path.end(), body->begin(), body->end());
        if (kind == PathKind::Car && req.vehicle.kind == motion::VehicleKind::Car) {
            auto in_ws = [&](const Rollout& r) {
                return std::all_of(r.trace.begin(), r.trace.end(), [&](const Vec3& p) { return ws.free(p); });
            };
            auto roll = car_rollout(path, req.start, req.vehicle, req.dt);
            if (!roll.arrived || !in_ws(roll)) continue;
            // tracking bound: smoothed kinds only
            if (smooths(req.kind) && roll.max_deviation > req.max_tracking_error) continue;
        }
        if (path_is_clear(path, others, req.positions, ws.d_s)) return path;
    }
    return std::nullopt;
}

} // namespace koord::planner
