#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "koord/motion/vehicle.hpp"
#include "koord/planner/geometry.hpp"

namespace koord::planner {

struct Workspace {
    Box bounds{{0, 0, 0}, {8, 7, 3}};
    std::vector<Box> obstacles;
    double d_s = 0.5;

    bool free(const Vec3& p) const;
    /// Exact segment/box test, so it is at least as strict as sampling at
    /// any resolution.
    bool segment_free(const Vec3& a, const Vec3& b) const;
};

enum class PathKind { Car, Quad };

enum class PlannerKind { RrtCar, RrtQuad, RrtSmoothCar, RrtSmoothQuad };

std::string to_string(PlannerKind k);
PlannerKind parse_planner_kind(const std::string& s);
PathKind path_kind(PlannerKind k);
bool smooths(PlannerKind k);

struct RrtParams {
    double step = 0.25;
    double goal_bias = 0.1;
    int max_iters = 5000;
    int smooth_rounds = 100;
};

/// Extra edge constraint on top of the static obstacles.
using EdgeCheck = std::function<bool(const Vec3&, const Vec3&)>;

using Path = std::vector<Vec3>;

/// Throws std::invalid_argument when an endpoint is outside the bounds,
/// inside an obstacle, or (for cars) off the ground plane. Returns nullopt
/// when no path is found within max_iters samples.
std::optional<Path> rrt_plan(const Vec3& start, const Vec3& goal, const Workspace& ws, PathKind kind,
                             std::uint64_t seed, const RrtParams& params = {}, const EdgeCheck& extra = {});

/// Random shortcutting; keeps both endpoints and never lengthens the path.
Path smooth(const Path& path, const Workspace& ws, std::uint64_t seed, int rounds, const EdgeCheck& extra = {});

struct Reservation {
    int pid = 0;
    Path path;
    bool active = true;
};

/// True iff the d_s tube around `path` meets no active reservation's tube
/// and no other robot's position inflated by d_s.
bool path_is_clear(const Path& path, const std::vector<Reservation>& reservations, const std::vector<Vec3>& positions,
                   double d_s);

struct FindPathRequest {
    int pid = 0;
    motion::Pose start;
    Vec3 goal;
    PlannerKind kind = PlannerKind::RrtCar;
    motion::VehicleModel vehicle;  // used for the car's initial turning arc
    std::vector<Reservation> reservations;
    std::vector<Vec3> positions;
    std::uint64_t seed = 0;
    RrtParams params;
    int attempts = 3;
    double dt = 0.01;                   // car rollouts use this step
    double max_tracking_error = 0.2;    // car paths the controller cannot hold are rejected
};

/// Plans, optionally smooths, and checks clearance, retrying with fresh
/// seeds. nullopt means blocked.
std::optional<Path> find_path(const FindPathRequest& req, const Workspace& ws);

/// Arc of radius 1.2x the car's minimum turning radius that brings the
/// heading within 20 degrees of the goal bearing. Empty when no turn is
/// needed or the goal lies inside the turning circle.
struct Rollout {
    bool arrived = false;
    double max_deviation = 0.0;  // from the path polyline, metres
    Path trace;                  // one point per step
};

/// Drives the car controller along `path` from `start` at rest until it
/// reports reached or a time budget runs out.
Rollout car_rollout(const Path& path, const motion::Pose& start, const motion::VehicleModel& car, double dt);

Path heading_arc(const motion::Pose& start, const Vec3& goal, const motion::VehicleModel& car);

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

} // namespace koord::planner
