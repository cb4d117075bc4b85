#include "koord/sim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "koord/dsm/agent.hpp"
#include "koord/dsm/wire.hpp"
#include "koord/lang/checker.hpp"
#include "koord/lang/parser.hpp"
#include "koord/motion/vehicle.hpp"
#include "koord/net/transport.hpp"
#include "koord/planner/planner.hpp"

namespace koord::sim {

std::shared_ptr<lang::EventTable> compile_program(const std::string& source, int num_agents, const std::string& file) {
    lang::CheckResult checked;
    try {
        checked = lang::check(lang::parse_source(source), num_agents);
    } catch (const lang::CompileError& e) {
        throw ConfigError("program", lang::format_diagnostic(file, e.diagnostic()));
    }
    if (!checked.ok()) {
        std::string msg;
        for (const auto& d : checked.diagnostics) msg += (msg.empty() ? "" : "\n") + lang::format_diagnostic(file, d);
        throw ConfigError("program", msg);
    }
    return std::make_shared<lang::EventTable>(lang::lower(*checked.program));
}

namespace {

struct Robot {
    int pid = 0;
    const DeviceConfig* device = nullptr;
    motion::MotionState motion;
    std::unique_ptr<dsm::Agent> agent;
    bool halted = false;
    std::uint64_t blocked = 0;
    std::uint64_t events = 0;
};

std::vector<planner::Reservation> reservations_for(int pid, const std::vector<PosList>& routes) {
    std::vector<planner::Reservation> out;
    for (std::size_t j = 0; j < routes.size(); ++j) {
        if (static_cast<int>(j) == pid || routes[j].empty()) continue;
        out.push_back({static_cast<int>(j), points_of(routes[j]), true});
    }
    return out;
}

bool all_assigned(const PosList& tasks) {
    return std::all_of(tasks.begin(), tasks.end(), [](const TaggedPoint& t) { return t.claim >= 0; });
}

class Run {
public:
    Run(SimConfig cfg, const RunOptions& opts) : cfg_(std::move(cfg)), opts_(opts), trace_(opts.trace, cfg_.dt) {}

    RunResult go();

private:
    void setup();
    void round(std::int64_t tick);
    void sample(std::int64_t tick);
    void fault(Robot& r, std::int64_t tick, const std::string& what);
    void deliver_all(double now);
    void send(int pid, const dsm::UpdateMsg& m, double now);
    PosList service_find_path(int pid, const Vec3& goal, const std::vector<PosList>& routes);
    bool finished();

    SimConfig cfg_;
    RunOptions opts_;
    TraceWriter trace_;
    std::shared_ptr<lang::EventTable> table_;
    std::unique_ptr<net::Transport> net_;
    std::vector<Robot> robots_;
    std::unique_ptr<SafetyMonitor> safety_;
    std::unique_ptr<VisitMonitor> visits_;
    int tasks_var_ = -1;
    std::uint32_t round_ = 0;
    int idle_rounds_ = 0;
    bool round_active_ = false;
    std::vector<std::string> faults_;
    std::string stop_reason_;
};

void Run::setup() {
    if (opts_.seed) {
        cfg_.seed = *opts_.seed;
        cfg_.net.seed = *opts_.seed;
    }
    if (opts_.net_mode) cfg_.net.mode = *opts_.net_mode;
    if (opts_.halt_on_violation) cfg_.halt_on_violation = *opts_.halt_on_violation;
    validate(cfg_);
    if (cfg_.program_source.empty()) {
        std::ifstream in(cfg_.program_path);
        if (!in) throw ConfigError("program", fmt::format("cannot open program '{}'", cfg_.program_path));
        std::stringstream ss;
        ss << in.rdbuf();
        cfg_.program_source = ss.str();
    }
    table_ = compile_program(cfg_.program_source, cfg_.num_robots, cfg_.program_path);

    if (const auto* v = table_->find_shared("tasks"); v && v->type == ValueType::PosList && !v->indexed_by_pid) {
        tasks_var_ = v->slot;
        PosList seeded = to_pos_list(cfg_.tasks);
        table_->shared_init[static_cast<std::size_t>(v->slot)] = [seeded](lang::Frame&) { return Value{seeded}; };
    }

    if (cfg_.net.mode == net::NetMode::Udp) {
        cfg_.net.ports.clear();
        bool explicit_ports = std::any_of(cfg_.robots.begin(), cfg_.robots.end(), [](const RobotConfig& r) { return r.port != 0; });
        if (explicit_ports) {
            for (const auto& r : cfg_.robots) cfg_.net.ports.push_back(r.port ? r.port : (cfg_.net.base_port ? cfg_.net.base_port + r.pid : 0));
        }
    }
    net_ = net::make_transport(cfg_.net, cfg_.num_robots);

    dsm::Services services;
    services.find_path = [this](int pid, const Vec3& goal, const std::vector<PosList>& routes) {
        return service_find_path(pid, goal, routes);
    };
    services.path_is_clear = [this](int pid, const PosList& path, const std::vector<PosList>& routes) {
        return planner::path_is_clear(points_of(path), reservations_for(pid, routes), {}, cfg_.workspace.d_s);
    };

    robots_.resize(static_cast<std::size_t>(cfg_.num_robots));
    for (const auto& rc : cfg_.robots) {
        auto& r = robots_[static_cast<std::size_t>(rc.pid)];
        r.pid = rc.pid;
        r.device = &cfg_.device_of(rc);
        r.motion.pose = rc.start;
        r.agent = std::make_unique<dsm::Agent>(rc.pid, cfg_.num_robots, table_, services, opts_.arbiter);
        r.agent->clock().delta = cfg_.delta;
    }
    safety_ = std::make_unique<SafetyMonitor>(cfg_.workspace.d_s, cfg_.num_robots);
    visits_ = std::make_unique<VisitMonitor>(cfg_.tasks, cfg_.eps_v, cfg_.delta_v, cfg_.dt, cfg_.num_robots);
    trace_.header(cfg_.describe());
}

PosList Run::service_find_path(int pid, const Vec3& goal, const std::vector<PosList>& routes) {
    auto& r = robots_[static_cast<std::size_t>(pid)];
    planner::FindPathRequest req;
    req.pid = pid;
    req.start = r.motion.pose;
    req.goal = goal;
    req.kind = r.device->planner;
    req.vehicle = r.device->model;
    req.reservations = reservations_for(pid, routes);
    req.seed = planner::mix_seed(planner::mix_seed(cfg_.seed, static_cast<std::uint64_t>(pid)), round_);
    req.params = cfg_.rrt;
    req.dt = cfg_.dt;
    std::optional<planner::Path> path;
    try {
        path = planner::find_path(req, cfg_.workspace);
    } catch (const std::invalid_argument& e) {
        throw lang::AgentFault(fmt::format("findPath: {}", e.what()));
    }
    if (!path) {
        ++r.blocked;
        return {};
    }
    return to_pos_list(*path);
}

void Run::fault(Robot& r, std::int64_t tick, const std::string& what) {
    r.halted = true;
    r.motion.speed = 0.0;
    faults_.push_back(fmt::format("pid {} at {}: {}", r.pid, format_time(static_cast<double>(tick) * cfg_.dt), what));
    trace_.add(tick, r.pid, RecordKind::Event, "fault " + what);
}

void Run::send(int pid, const dsm::UpdateMsg& m, double now) {
    auto bytes = dsm::encode(m);
    net_->broadcast(pid, bytes, now);
}

void Run::deliver_all(double now) {
    for (auto& r : robots_) {
        auto packets = net_->poll(r.pid, now);
        if (r.halted) continue;
        for (auto& p : packets) {
            try {
                r.agent->deliver(dsm::decode(p.bytes, [this](int v) {
                    return table_->shared_vars.at(static_cast<std::size_t>(v)).type;
                }));
            } catch (const std::exception& e) {
                trace_.add(to_tick(now, cfg_.dt), kHarnessPid, RecordKind::Monitor,
                           fmt::format("drop packet from pid {}: {}", p.sender, e.what()));
            }
        }
    }
}

void Run::round(std::int64_t tick) {
    const double now = static_cast<double>(tick) * cfg_.dt;
    net_->set_round(round_);
    deliver_all(now);

    auto guarded = [&](Robot& r, auto&& body) {
        if (r.halted) return;
        try {
            body();
        } catch (const std::exception& e) {
            fault(r, tick, e.what());
        }
    };

    for (auto& r : robots_) {
        guarded(r, [&] { r.agent->begin_round({r.motion.pose.position(), r.motion.reached}); });
    }
    for (auto& r : robots_) {
        guarded(r, [&] {
            r.agent->select_event();
            if (auto m = r.agent->intent()) send(r.pid, *m, now);
        });
    }
    net_->settle(1.0);
    deliver_all(now);

    bool activity = false;
    for (auto& r : robots_) {
        guarded(r, [&] {
            r.agent->arbitrate();
            if (auto g = r.agent->grant()) {
                send(r.pid, *g, now);
                trace_.add(tick, r.pid, RecordKind::Grant, fmt::format("scope {} round {}", g->var_id, g->round));
            }
            std::string ev = r.agent->execute_effect();
            if (ev.empty()) return;
            ++r.events;
            activity = true;
            trace_.add(tick, r.pid, RecordKind::Event, ev);
            for (const auto& c : r.agent->claims()) {
                const auto& name = table_->shared_vars.at(static_cast<std::size_t>(c.var_id)).name;
                trace_.add(tick, r.pid, RecordKind::Event, fmt::format("claim {} {}", name, c.index));
                if (c.var_id == tasks_var_) visits_->claim(tick, c.index, c.claimant);
            }
            if (const auto& route = r.agent->actuated()) {
                try {
                    motion::set_route(r.motion, r.device->model, points_of(*route));
                } catch (const std::invalid_argument& e) {
                    throw lang::AgentFault(fmt::format("Motion.route: {}", e.what()));
                }
                std::string pts;
                for (const auto& w : *route) pts += fmt::format(" {:.3f},{:.3f},{:.3f}", w.p.x, w.p.y, w.p.z);
                trace_.add(tick, r.pid, RecordKind::Event, "route" + pts);
            }
        });
    }
    for (auto& r : robots_) {
        guarded(r, [&] {
            auto msgs = r.agent->commit_round();
            std::size_t bytes = 0;
            for (const auto& m : msgs) {
                auto encoded = dsm::encode(m);
                bytes += encoded.size();
                net_->broadcast(r.pid, encoded, now);
            }
            if (!msgs.empty()) {
                activity = true;
                trace_.add(tick, r.pid, RecordKind::Msg, fmt::format("sent {} bytes {}", msgs.size(), bytes));
            }
            for (const auto& c : r.agent->take_conflicts()) trace_.add(tick, r.pid, RecordKind::Monitor, c);
        });
    }
    net_->settle(1.0);
    ++round_;
    idle_rounds_ = activity ? 0 : idle_rounds_ + 1;
}

bool Run::finished() {
    const Robot* alive = nullptr;
    for (const auto& r : robots_) {
        if (!r.halted) {
            if (!alive) alive = &r;
            if (!r.motion.reached) return false;
        }
    }
    if (!alive) {
        stop_reason_ = "all agents halted";
        return true;
    }
    if (idle_rounds_ < 2) return false;
    if (tasks_var_ >= 0 && !all_assigned(std::get<PosList>(alive->agent->store().get(tasks_var_, 0)))) return false;
    stop_reason_ = "complete";
    return true;
}

void Run::sample(std::int64_t tick) {
    std::vector<Vec3> pos;
    for (const auto& r : robots_) {
        std::string text = format_pose(r.motion.pose);
        trace_.add(tick, r.pid, RecordKind::Pose, text);
        pos.push_back(parse_pose(text).position());  // monitors see what the trace records
    }
    for (const auto& v : safety_->observe(tick, pos)) {
        trace_.add(tick, kHarnessPid, RecordKind::Monitor,
                   fmt::format("safety violation pids {} {} distance {:.4f}", v.a, v.b, v.distance));
    }
    for (const auto& v : visits_->observe(tick, pos)) {
        trace_.add(tick, kHarnessPid, RecordKind::Monitor, fmt::format("visit task {} pid {}", v.task, v.pid));
    }
}

RunResult Run::go() {
    setup();
    const auto wall0 = std::chrono::steady_clock::now();
    const int spr = cfg_.steps_per_round();
    const auto last_tick = static_cast<std::int64_t>(std::floor(cfg_.duration / cfg_.dt + 1e-9));
    std::int64_t tick = 0;
    bool complete = false;
    for (;; ++tick) {
        bool round_due = tick % spr == 0 && (round_ + 1) * cfg_.delta <= cfg_.duration + 1e-9;
        if (round_due) {
            round(tick);
            complete = finished();
        }
        sample(tick);
        if (complete) break;
        if (cfg_.halt_on_violation) {
            bool bad = !safety_->report().pass();
            if (!bad && tasks_var_ >= 0) {
                for (const auto& f : visits_->report().failures) bad |= f.find("claimed by pids") != std::string::npos;
            }
            if (bad) {
                stop_reason_ = "violation";
                break;
            }
        }
        if (tick >= last_tick) {
            stop_reason_ = "duration";
            break;
        }
        for (auto& r : robots_) {
            if (!r.halted) motion::step(r.motion, r.device->model, cfg_.dt);
        }
    }
    // last commits are still in flight
    net_->settle(1.0);
    deliver_all(static_cast<double>(tick) * cfg_.dt);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();

    RunResult res;
    res.has_tasks = !cfg_.tasks.empty() || tasks_var_ >= 0;
    res.safety = safety_->report();
    res.visits = visits_->report();
    res.faults = faults_;
    res.app_complete = complete && stop_reason_ == "complete";

    auto& m = res.metrics;
    m.sim_time = static_cast<double>(tick) * cfg_.dt;
    m.wall_time = wall;
    m.rt_factor = wall > 0 ? m.sim_time / wall : 0.0;
    m.rounds = round_;
    fill_traffic(m, net_->stats());
    for (std::size_t p = 0; p < robots_.size(); ++p) {
        m.robots[p].events = robots_[p].events;
        m.robots[p].blocked_rounds = robots_[p].blocked;
        m.robots[p].faulted = robots_[p].halted;
        m.blocked_rounds += robots_[p].blocked;
    }
    m.tasks_total = static_cast<int>(cfg_.tasks.size());
    m.tasks_completed = res.visits.completed();
    if (auto c = res.visits.completion_tick(); c && !cfg_.tasks.empty()) m.completion_time = static_cast<double>(*c) * cfg_.dt;
    m.min_distance = res.safety.min_distance;
    m.safety_violations = static_cast<int>(res.safety.violations.size());
    m.faults = static_cast<int>(faults_.size());
    m.stop_reason = stop_reason_;

    trace_.add(tick, kHarnessPid, RecordKind::Monitor,
               fmt::format("verdict safety {} min {}", res.safety.pass() ? "PASS" : "FAIL",
                           std::isfinite(res.safety.min_distance) ? fmt::format("{:.4f}", res.safety.min_distance) : "inf"));
    if (res.has_tasks) {
        std::string v = res.visits.pass() ? "PASS" : "FAIL";
        for (const auto& f : res.visits.failures) v += "; " + f;
        trace_.add(tick, kHarnessPid, RecordKind::Monitor, "verdict visits " + v);
    }
    trace_.add(tick, kHarnessPid, RecordKind::Monitor, "stop " + stop_reason_);
    trace_.flush();
    return res;
}

} // namespace

RunResult run(SimConfig cfg, const RunOptions& opts) {
    Run r(std::move(cfg), opts);
    return r.go();
}

} // namespace koord::sim
