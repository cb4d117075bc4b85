#include "koord/sim/metrics.hpp"

#include <cmath>

#include <fmt/format.h>

namespace koord::sim {

void fill_traffic(Metrics& m, const net::PacketStats& stats) {
    double t = m.sim_time > 0 ? m.sim_time : 1.0;
    m.robots.resize(stats.per_pid.size());
    for (std::size_t p = 0; p < stats.per_pid.size(); ++p) {
        const auto& s = stats.per_pid[p];
        auto& r = m.robots[p];
        r.pid = static_cast<int>(p);
        r.packets_sent_per_s = static_cast<double>(s.packets_sent) / t;
        r.bytes_sent_per_s = static_cast<double>(s.bytes_sent) / t;
        r.packets_received_per_s = static_cast<double>(s.packets_received) / t;
        r.bytes_received_per_s = static_cast<double>(s.bytes_received) / t;
    }
    m.fleet_packets_per_s = static_cast<double>(stats.total_received()) / t;
    m.fleet_bytes_per_s = static_cast<double>(stats.total_bytes_received()) / t;
    m.receptions_per_round = m.rounds ? static_cast<double>(stats.total_received()) / m.rounds : 0.0;
    m.packets_dropped = stats.total_dropped();
}

void write_metrics(std::ostream& out, const Metrics& m) {
    auto kv = [&](std::string_view k, const auto& v) { out << k << '=' << v << '\n'; };
    kv("sim_time", fmt::format("{:.3f}", m.sim_time));
    kv("wall_time", fmt::format("{:.3f}", m.wall_time));
    kv("rt_factor", fmt::format("{:.3f}", m.rt_factor));
    kv("rounds", m.rounds);
    kv("fleet_packets_per_s", fmt::format("{:.3f}", m.fleet_packets_per_s));
    kv("fleet_bytes_per_s", fmt::format("{:.3f}", m.fleet_bytes_per_s));
    kv("receptions_per_round", fmt::format("{:.3f}", m.receptions_per_round));
    kv("packets_dropped", m.packets_dropped);
    kv("tasks_total", m.tasks_total);
    kv("tasks_completed", m.tasks_completed);
    kv("completion_time", m.completion_time ? fmt::format("{:.3f}", *m.completion_time) : std::string("NA"));
    kv("blocked_rounds", m.blocked_rounds);
    kv("min_distance", std::isfinite(m.min_distance) ? fmt::format("{:.4f}", m.min_distance) : std::string("inf"));
    kv("safety_violations", m.safety_violations);
    kv("faults", m.faults);
    kv("stop_reason", m.stop_reason);
    for (const auto& r : m.robots) {
        kv(fmt::format("robot{}.packets_per_s", r.pid), fmt::format("{:.3f}", r.packets_sent_per_s));
        kv(fmt::format("robot{}.bytes_per_s", r.pid), fmt::format("{:.3f}", r.bytes_sent_per_s));
    }
}

void write_robot_csv(std::ostream& out, const Metrics& m) {
    out << "pid,packets_sent_per_s,bytes_sent_per_s,packets_received_per_s,bytes_received_per_s,events,blocked_rounds,faulted\n";
    for (const auto& r : m.robots) {
        out << fmt::format("{},{:.3f},{:.3f},{:.3f},{:.3f},{},{},{}\n", r.pid, r.packets_sent_per_s, r.bytes_sent_per_s,
                           r.packets_received_per_s, r.bytes_received_per_s, r.events, r.blocked_rounds, r.faulted ? 1 : 0);
    }
}

void write_distance_csv(std::ostream& out, const SafetyReport& s, double dt) {
    out << "time,min_distance\n";
    for (const auto& [tick, d] : s.series) {
        out << fmt::format("{:.3f},{}\n", static_cast<double>(tick) * dt, std::isfinite(d) ? fmt::format("{:.4f}", d) : "inf");
    }
}

void write_task_csv(std::ostream& out, const VisitReport& v, double dt) {
    out << "task,claimant,claim_time,completion_time,claimant_visits,other_visits\n";
    for (std::size_t i = 0; i < v.tasks.size(); ++i) {
        const auto& t = v.tasks[i];
        std::string who;
        for (int p : t.claimants) who += (who.empty() ? "" : " ") + std::to_string(p);
        auto time = [&](const std::optional<std::int64_t>& k) {
            return k ? fmt::format("{:.3f}", static_cast<double>(*k) * dt) : std::string();
        };
        out << fmt::format("{},{},{},{},{},{}\n", i, who, time(t.claim_tick), time(t.completed_tick), t.claimant_visits, t.other_visits);
    }
}

} // namespace koord::sim
