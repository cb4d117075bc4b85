#pragma once

#include <vector>

#include "koord/vec3.hpp"

namespace koord::planner {

struct Box {
    Vec3 lo;
    Vec3 hi;

    bool contains(const Vec3& p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z && p.z <= hi.z;
    }
};

/// Closest distance between segments [p0,p1] and [q0,q1]. Degenerate
/// segments (points) are allowed.
double segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1);

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);

double path_length(const std::vector<Vec3>& path);

/// Minimum distance between two polylines; a single-point polyline is a point.
double polyline_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

} // namespace koord::planner
