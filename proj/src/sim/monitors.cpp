#include "koord/sim/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace koord::sim {

SafetyMonitor::SafetyMonitor(double d_s, int num_robots)
    : n_(num_robots), inside_(static_cast<std::size_t>(num_robots * num_robots), 0) {
    report_.d_s = d_s;
}

std::vector<PairViolation> SafetyMonitor::observe(std::int64_t tick, const std::vector<Vec3>& positions) {
    std::vector<PairViolation> fresh;
    double m = std::numeric_limits<double>::infinity();
    const int n = static_cast<int>(positions.size());
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            double d = distance(positions[a], positions[b]);
            m = std::min(m, d);
            if (d < report_.min_distance) {
                report_.min_distance = d;
                report_.min_tick = tick;
                report_.min_a = a;
                report_.min_b = b;
            }
            auto& in = inside_[static_cast<std::size_t>(a * n_ + b)];
            bool close = d < report_.d_s;
            if (close && !in) {
                fresh.push_back({tick, a, b, d});
                report_.violations.push_back(fresh.back());
            }
            in = close;
        }
    }
    report_.series.emplace_back(tick, m);
    return fresh;
}

int VisitReport::completed() const {
    return static_cast<int>(std::count_if(tasks.begin(), tasks.end(), [](const TaskVerdict& t) { return t.completed_tick.has_value(); }));
}

std::optional<std::int64_t> VisitReport::completion_tick() const {
    std::int64_t last = 0;
    for (const auto& t : tasks) {
        if (!t.completed_tick) return std::nullopt;
        last = std::max(last, *t.completed_tick);
    }
    return last;
}

VisitMonitor::VisitMonitor(std::vector<Vec3> tasks, double eps_v, double delta_v, double dt, int num_robots)
    : tasks_(std::move(tasks)),
      eps_v_(eps_v),
      dwell_ticks_(static_cast<std::int64_t>(std::ceil(delta_v / dt - 1e-9))),
      n_(num_robots),
      entered_(tasks_.size() * static_cast<std::size_t>(num_robots), -1),
      counted_(tasks_.size() * static_cast<std::size_t>(num_robots), 0),
      verdicts_(tasks_.size()) {}

std::vector<Visit> VisitMonitor::observe(std::int64_t tick, const std::vector<Vec3>& positions) {
    std::vector<Visit> fresh;
    for (int p = 0; p < static_cast<int>(positions.size()) && p < n_; ++p) {
        for (std::size_t i = 0; i < tasks_.size(); ++i) {
            auto k = static_cast<std::size_t>(p) * tasks_.size() + i;
            if (distance(positions[p], tasks_[i]) <= eps_v_) {
                if (entered_[k] < 0) entered_[k] = tick;
                if (!counted_[k] && tick - entered_[k] >= dwell_ticks_) {
                    counted_[k] = 1;
                    Visit v{static_cast<int>(i), p, entered_[k], tick};
                    visits_.push_back(v);
                    fresh.push_back(v);
                }
            } else {
                entered_[k] = -1;
                counted_[k] = 0;
            }
        }
    }
    return fresh;
}

void VisitMonitor::claim(std::int64_t tick, int task, int pid) {
    if (task < 0 || task >= static_cast<int>(verdicts_.size())) return;
    auto& v = verdicts_[static_cast<std::size_t>(task)];
    v.claimants.insert(pid);
    if (!v.claim_tick) v.claim_tick = tick;
}

VisitReport VisitMonitor::report() const {
    VisitReport r;
    r.tasks = verdicts_;
    r.visits = visits_;
    for (const auto& v : visits_) {
        auto& t = r.tasks[static_cast<std::size_t>(v.task)];
        bool by_claimant = t.claimants.count(v.pid) && t.claim_tick && v.verified_tick >= *t.claim_tick;
        if (by_claimant) {
            ++t.claimant_visits;
            if (!t.completed_tick) t.completed_tick = v.verified_tick;
        } else {
            ++t.other_visits;
        }
    }
    for (std::size_t i = 0; i < r.tasks.size(); ++i) {
        const auto& t = r.tasks[i];
        if (t.claimants.empty()) {
            r.failures.push_back(fmt::format("task {} never claimed", i));
        } else if (t.claimants.size() > 1) {
            std::string pids;
            for (int p : t.claimants) pids += (pids.empty() ? "" : " ") + std::to_string(p);
            r.failures.push_back(fmt::format("task {} claimed by pids {}", i, pids));
        } else if (!t.completed_tick) {
            r.failures.push_back(fmt::format("task {} claimed by pid {} but not visited", i, *t.claimants.begin()));
        }
    }
    return r;
}

std::int64_t to_tick(double time, double dt) {
    return static_cast<std::int64_t>(std::llround(time / dt));
}

namespace {

double header_number(const Trace& t, const std::string& key, double fallback) {
    auto s = t.header_value(key);
    if (s.empty()) return fallback;
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw TraceError(0, fmt::format("bad header value for '{}': '{}'", key, s));
    }
}

} // namespace

MonitorSettings settings_from_header(const Trace& t) {
    MonitorSettings s;
    s.dt = header_number(t, "dt", s.dt);
    s.d_s = header_number(t, "d_s", s.d_s);
    s.eps_v = header_number(t, "eps_v", s.eps_v);
    s.delta_v = header_number(t, "delta_v", s.delta_v);
    s.num_robots = static_cast<int>(header_number(t, "num_robots", 0));
    if (!(s.dt > 0)) throw TraceError(0, "header dt must be positive");
    for (auto [it, end] = t.header.equal_range("task"); it != end; ++it) {
        double x = 0, y = 0, z = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ss(it->second);
        if (!(ss >> x >> c1 >> y >> c2 >> z) || c1 != ',' || c2 != ',') {
            throw TraceError(0, fmt::format("bad task header '{}'", it->second));
        }
        s.tasks.push_back({x, y, z});
    }
    return s;
}

Replay replay(const Trace& t) {
    return replay(t, settings_from_header(t));
}

Replay replay(const Trace& t, const MonitorSettings& s) {
    int n = s.num_robots;
    if (n <= 0) {
        for (const auto& r : t.records) n = std::max(n, r.pid + 1);
    }
    SafetyMonitor safety(s.d_s, n);
    VisitMonitor visits(s.tasks, s.eps_v, s.delta_v, s.dt, n);
    Replay out;

    std::size_t i = 0;
    while (i < t.records.size()) {
        std::int64_t tick = to_tick(t.records[i].time, s.dt);
        std::vector<motion::Pose> poses(static_cast<std::size_t>(n));
        std::vector<char> have(static_cast<std::size_t>(n), 0);
        int pose_count = 0;
        for (; i < t.records.size() && to_tick(t.records[i].time, s.dt) == tick; ++i) {
            const auto& r = t.records[i];
            if (r.pid < 0 || r.pid >= n) continue;
            if (r.kind == RecordKind::Pose) {
                poses[static_cast<std::size_t>(r.pid)] = parse_pose(r.payload);
                have[static_cast<std::size_t>(r.pid)] = 1;
                ++pose_count;
            } else if (r.kind == RecordKind::Event) {
                for (const auto& part : split_payload(r.payload)) {
                    int task = 0;
                    if (std::sscanf(part.c_str(), "claim tasks %d", &task) == 1) visits.claim(tick, task, r.pid);
                }
            }
        }
        if (pose_count == 0) continue;
        if (pose_count != n) throw TraceError(0, fmt::format("sample at tick {} has {} of {} poses", tick, pose_count, n));
        std::vector<Vec3> pos;
        for (const auto& p : poses) pos.push_back(p.position());
        safety.observe(tick, pos);
        visits.observe(tick, pos);
        out.ticks.push_back(tick);
        out.poses.push_back(std::move(poses));
    }
    out.safety = safety.report();
    out.visits = visits.report();
    return out;
}

} // namespace koord::sim
