#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "koord/sim/trace.hpp"
#include "koord/vec3.hpp"

namespace koord::sim {

struct PairViolation {
    std::int64_t tick = 0;
    int a = 0;
    int b = 0;
    double distance = 0.0;
};

struct SafetyReport {
    double d_s = 0.5;
    double min_distance = std::numeric_limits<double>::infinity();
    std::int64_t min_tick = 0;
    int min_a = -1;
    int min_b = -1;
    std::vector<PairViolation> violations;  // one per pair each time it enters violation
    std::vector<std::pair<std::int64_t, double>> series;  // (tick, min pairwise distance)

    bool pass() const { return violations.empty(); }
};

/// Pairwise 3D separation, sampled every dt.
class SafetyMonitor {
public:
    SafetyMonitor(double d_s, int num_robots);

    /// Returns the pairs that entered violation at this sample.
    std::vector<PairViolation> observe(std::int64_t tick, const std::vector<Vec3>& positions);
    const SafetyReport& report() const { return report_; }

private:
    int n_;
    std::vector<char> inside_;  // per pair, currently closer than d_s
    SafetyReport report_;
};

struct Visit {
    int task = 0;
    int pid = 0;
    std::int64_t start_tick = 0;
    std::int64_t verified_tick = 0;  // dwell reached delta_v here
};

struct TaskVerdict {
    std::set<int> claimants;
    std::optional<std::int64_t> claim_tick;
    int claimant_visits = 0;
    int other_visits = 0;
    std::optional<std::int64_t> completed_tick;  // first claimant visit verified after the claim
};

struct VisitReport {
    std::vector<TaskVerdict> tasks;
    std::vector<Visit> visits;
    std::vector<std::string> failures;

    bool pass() const { return failures.empty(); }
    int completed() const;
    /// Tick of the last verified task, if every task completed.
    std::optional<std::int64_t> completion_tick() const;
};

/// Dwell detection inside eps_v balls plus the claim cross-check.
class VisitMonitor {
public:
    VisitMonitor(std::vector<Vec3> tasks, double eps_v, double delta_v, double dt, int num_robots);

    /// Returns visits verified at this sample.
    std::vector<Visit> observe(std::int64_t tick, const std::vector<Vec3>& positions);
    void claim(std::int64_t tick, int task, int pid);

    /// Final verdicts; call after the last sample.
    VisitReport report() const;

private:
    std::vector<Vec3> tasks_;
    double eps_v_;
    std::int64_t dwell_ticks_;
    int n_;
    std::vector<std::int64_t> entered_;  // per (pid, task): entry tick or -1
    std::vector<char> counted_;
    std::vector<Visit> visits_;
    std::vector<TaskVerdict> verdicts_;
};

struct MonitorSettings {
    double dt = 0.01;
    double d_s = 0.5;
    double eps_v = 0.2;
    double delta_v = 1.0;
    int num_robots = 0;
    std::vector<Vec3> tasks;
};

/// Settings echoed in a trace header.
MonitorSettings settings_from_header(const Trace& t);

struct Replay {
    SafetyReport safety;
    VisitReport visits;
    std::vector<std::int64_t> ticks;                     // sample ticks in order
    std::vector<std::vector<motion::Pose>> poses;        // per sample, per pid
};

/// Recomputes the monitor verdicts from pose and claim records.
/// Throws TraceError when a sample lacks a pose for some robot.
Replay replay(const Trace& t);
Replay replay(const Trace& t, const MonitorSettings& s);

std::int64_t to_tick(double time, double dt);

} // namespace koord::sim
