#include "koord/planner/geometry.hpp"

#include <algorithm>
#include <limits>

namespace koord::planner {

double segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
    // closest points of two segments, clamped parametric form
    constexpr double eps = 1e-12;
    Vec3 d1 = p1 - p0;
    Vec3 d2 = q1 - q0;
    Vec3 r = p0 - q0;
    double a = dot(d1, d1);
    double e = dot(d2, d2);
    double f = dot(d2, r);
    double s = 0.0;
    double t = 0.0;
    if (a <= eps && e <= eps) return norm(r);
    if (a <= eps) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        double c = dot(d1, r);
        if (e <= eps) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            double b = dot(d1, d2);
            double denom = a * e - b * b;
            s = denom > eps ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return distance(p0 + d1 * s, q0 + d2 * t);
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    return segment_distance(p, p, a, b);
}

double path_length(const std::vector<Vec3>& path) {
    double len = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) len += distance(path[i - 1], path[i]);
    return len;
}

double polyline_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    std::size_t na = std::max<std::size_t>(a.size() - 1, 1);
    std::size_t nb = std::max<std::size_t>(b.size() - 1, 1);
    for (std::size_t i = 0; i < na; ++i) {
        const Vec3& a0 = a[i];
        const Vec3& a1 = a.size() > 1 ? a[i + 1] : a[i];
        for (std::size_t j = 0; j < nb; ++j) {
            const Vec3& b0 = b[j];
            const Vec3& b1 = b.size() > 1 ? b[j + 1] : b[j];
            best = std::min(best, segment_distance(a0, a1, b0, b1));
        }
    }
    return best;
}

} // namespace koord::planner
