#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "koord/net/transport.hpp"
#include "koord/sim/monitors.hpp"

namespace koord::sim {

struct RobotMetrics {
    int pid = 0;
    double packets_sent_per_s = 0.0;
    double bytes_sent_per_s = 0.0;
    double packets_received_per_s = 0.0;
    double bytes_received_per_s = 0.0;
    std::uint64_t events = 0;
    std::uint64_t blocked_rounds = 0;
    bool faulted = false;
};

struct Metrics {
    double sim_time = 0.0;
    double wall_time = 0.0;
    double rt_factor = 0.0;
    std::uint32_t rounds = 0;
    std::vector<RobotMetrics> robots;
    double fleet_packets_per_s = 0.0;  // receptions across the fleet
    double fleet_bytes_per_s = 0.0;
    double receptions_per_round = 0.0;
    std::uint64_t packets_dropped = 0;
    int tasks_total = 0;
    int tasks_completed = 0;
    std::optional<double> completion_time;
    std::uint64_t blocked_rounds = 0;
    double min_distance = 0.0;
    int safety_violations = 0;
    int faults = 0;
    std::string stop_reason;
};

/// Fills the traffic fields from transport counters.
void fill_traffic(Metrics& m, const net::PacketStats& stats);

/// `key=value` lines.
void write_metrics(std::ostream& out, const Metrics& m);
void write_robot_csv(std::ostream& out, const Metrics& m);
void write_distance_csv(std::ostream& out, const SafetyReport& s, double dt);
void write_task_csv(std::ostream& out, const VisitReport& v, double dt);

} // namespace koord::sim
