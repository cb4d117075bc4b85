#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "koord/lang/checker.hpp"
#include "koord/lang/parser.hpp"
#include "koord/sim/harness.hpp"
#include "koord/sim/metrics.hpp"
#include "koord/sim/monitors.hpp"
#include "koord/sim/scaling.hpp"
#include "koord/sim/trace.hpp"

namespace {

// exit codes
constexpr int kOk = 0;
constexpr int kDiagnostics = 1;
constexpr int kConfigError = 2;
constexpr int kViolation = 3;
constexpr int kFault = 4;

using namespace koord;

int cmd_compile(const std::string& path, int agents) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << path << ": cannot open file\n";
        return kDiagnostics;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    lang::CheckResult res;
    try {
        auto prog = lang::parse_source(ss.str());
        if (prog.events.empty()) {
            std::cerr << lang::format_diagnostic(path, {{1, 1}, lang::Severity::Error, "no events"}) << '\n';
            return kDiagnostics;
        }
        res = lang::check(std::move(prog), agents);
    } catch (const lang::CompileError& e) {
        std::cerr << lang::format_diagnostic(path, e.diagnostic()) << '\n';
        return kDiagnostics;
    }
    for (const auto& d : res.diagnostics) std::cerr << lang::format_diagnostic(path, d) << '\n';
    if (!res.ok()) return kDiagnostics;
    std::cout << fmt::format("{}: ok, {} events, {} shared and {} local variables\n", path, res.program->program.events.size(),
                             res.program->shared_vars.size(), res.program->local_vars.size());
    return kOk;
}

template <typename F>
bool write_file(const std::string& path, F&& body) {
    std::ofstream out(path);
    if (!out) {
        std::cerr << "cannot write " << path << '\n';
        return false;
    }
    body(out);
    return true;
}

struct SimulateArgs {
    std::string config;
    std::string trace = "trace.tsv";
    std::string metrics;
    std::optional<std::uint64_t> seed;
    std::string net;
    bool halt = false;
};

int cmd_simulate(const SimulateArgs& a) {
    sim::SimConfig cfg;
    sim::RunOptions opts;
    try {
        cfg = sim::load_config(a.config);
        opts.seed = a.seed;
        if (!a.net.empty()) opts.net_mode = net::parse_net_mode(a.net);
        if (a.halt) opts.halt_on_violation = true;
    } catch (const std::exception& e) {
        std::cerr << a.config << ": " << e.what() << '\n';
        return kConfigError;
    }
    std::ofstream trace(a.trace);
    if (!trace) {
        std::cerr << "cannot write " << a.trace << '\n';
        return kConfigError;
    }
    opts.trace = &trace;
    sim::RunResult res;
    try {
        res = sim::run(cfg, opts);
    } catch (const sim::ConfigError& e) {
        std::cerr << a.config << ": " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "simulation failed: " << e.what() << '\n';
        return kConfigError;
    }
    trace.close();

    const auto& m = res.metrics;
    std::cout << fmt::format("rounds {}  sim {:.2f} s  wall {:.2f} s  rt_factor {:.2f}\n", m.rounds, m.sim_time, m.wall_time, m.rt_factor);
    std::cout << fmt::format("safety {}  min distance {}\n", res.safety.pass() ? "PASS" : "FAIL",
                             std::isfinite(m.min_distance) ? fmt::format("{:.3f}", m.min_distance) : "inf");
    for (const auto& v : res.safety.violations) {
        std::cout << fmt::format("  pids {} and {} at {:.3f} s: {:.3f} m\n", v.a, v.b, static_cast<double>(v.tick) * cfg.dt, v.distance);
    }
    if (res.has_tasks) {
        std::cout << fmt::format("visits {}  tasks {}/{}  completion {}\n", res.visits.pass() ? "PASS" : "FAIL", m.tasks_completed,
                                 m.tasks_total, m.completion_time ? fmt::format("{:.2f} s", *m.completion_time) : "NA");
        for (const auto& f : res.visits.failures) std::cout << "  " << f << '\n';
    }
    for (const auto& f : res.faults) std::cout << "fault " << f << '\n';
    std::cout << "stop " << m.stop_reason << '\n';

    if (!a.metrics.empty()) {
        bool ok = write_file(a.metrics + ".txt", [&](std::ostream& o) { sim::write_metrics(o, m); }) &&
                  write_file(a.metrics + ".robots.csv", [&](std::ostream& o) { sim::write_robot_csv(o, m); }) &&
                  write_file(a.metrics + ".distances.csv", [&](std::ostream& o) { sim::write_distance_csv(o, res.safety, cfg.dt); }) &&
                  write_file(a.metrics + ".tasks.csv", [&](std::ostream& o) { sim::write_task_csv(o, res.visits, cfg.dt); });
        if (!ok) return kConfigError;
    }
    if (res.violation()) return kViolation;
    if (res.faulted()) return kFault;
    return kOk;
}

std::vector<int> parse_counts(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
        std::size_t used = 0;
        int v = std::stoi(part, &used);
        if (used != part.size() || v < 1) throw std::invalid_argument("bad count '" + part + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("no counts");
    return out;
}

int cmd_scaling(const std::string& app, const std::string& counts_text, const std::string& out_path, double duration,
                std::uint64_t seed, const std::string& apps_dir) {
    std::vector<int> counts;
    try {
        counts = parse_counts(counts_text);
        sim::formation_config(app, 1, duration, seed, apps_dir);
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return kConfigError;
    }
    sim::ScalingReport rep;
    try {
        rep = sim::scaling_experiment(app, counts, duration, seed, apps_dir);
    } catch (const std::exception& e) {
        std::cerr << "scaling failed: " << e.what() << '\n';
        return kConfigError;
    }
    sim::write_scaling_csv(std::cout, rep);
    if (!out_path.empty() && !write_file(out_path, [&](std::ostream& o) { sim::write_scaling_csv(o, rep); })) return kConfigError;
    return kOk;
}

int cmd_trace(const std::string& what, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << path << ": cannot open file\n";
        return kConfigError;
    }
    sim::Replay rep;
    sim::MonitorSettings settings;
    try {
        auto trace = sim::read_trace(in);
        settings = sim::settings_from_header(trace);
        rep = sim::replay(trace, settings);
    } catch (const std::exception& e) {
        std::cerr << path << ": " << e.what() << '\n';
        return kConfigError;
    }
    auto time = [&](std::int64_t tick) { return fmt::format("{:.3f}", static_cast<double>(tick) * settings.dt); };
    if (what == "distances") {
        sim::write_distance_csv(std::cout, rep.safety, settings.dt);
    } else if (what == "positions") {
        std::cout << "pid,time,x,y,z,yaw\n";
        std::size_t n = rep.poses.empty() ? 0 : rep.poses.front().size();
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t i = 0; i < rep.ticks.size(); ++i) {
                const auto& q = rep.poses[i][p];
                std::cout << fmt::format("{},{},{:.4f},{:.4f},{:.4f},{:.4f}\n", p, time(rep.ticks[i]), q.x, q.y, q.z, q.yaw);
            }
        }
    } else {
        std::cout << "task,pid,start,verified\n";
        for (const auto& v : rep.visits.visits) {
            std::cout << fmt::format("{},{},{},{}\n", v.task, v.pid, time(v.start_tick), time(v.verified_tick));
        }
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Koord toolkit: compile programs, run simulations, analyse traces"};
    app.require_subcommand(1);

    auto* compile = app.add_subcommand("compile", "Parse and check a program");
    std::string source;
    int agents = 4;
    compile->add_option("source", source, "Program file")->required();
    compile->add_option("-n,--agents", agents, "numAgents used for checking")->check(CLI::PositiveNumber);

    auto* simulate = app.add_subcommand("simulate", "Run a configured simulation");
    SimulateArgs sa;
    simulate->add_option("config", sa.config, "Config file")->required();
    simulate->add_option("--trace", sa.trace, "Trace output path")->capture_default_str();
    simulate->add_option("--metrics", sa.metrics, "Prefix for metrics text and CSV files");
    simulate->add_option("--seed", sa.seed, "Override the config seed");
    simulate->add_option("--net", sa.net, "Transport: in_process or udp");
    simulate->add_flag("--halt-on-violation", sa.halt, "Stop at the first monitor violation");

    auto* scaling = app.add_subcommand("scaling", "Message-rate scaling over robot counts");
    std::string sc_app, sc_counts = "2,4,8,16", sc_out;
    double sc_duration = 10.0;
    std::uint64_t sc_seed = 1;
    std::string apps_dir = KOORD_APPS_DIR;
    scaling->add_option("--app", sc_app, "shapeform or lineform")->required();
    scaling->add_option("--counts", sc_counts, "Comma-separated robot counts")->capture_default_str();
    scaling->add_option("--out", sc_out, "CSV output path");
    scaling->add_option("--duration", sc_duration, "Simulated seconds per run")->capture_default_str();
    scaling->add_option("--seed", sc_seed, "Seed")->capture_default_str();
    scaling->add_option("--apps-dir", apps_dir, "Directory holding the .koord programs")->capture_default_str();

    auto* trace = app.add_subcommand("trace", "Extract CSV from a trace file");
    std::string tr_what, tr_path;
    trace->add_option("what", tr_what, "distances, visits or positions")
        ->required()
        ->check(CLI::IsMember({"distances", "visits", "positions"}));
    trace->add_option("trace", tr_path, "Trace file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    if (*compile) return cmd_compile(source, agents);
    if (*simulate) return cmd_simulate(sa);
    if (*scaling) return cmd_scaling(sc_app, sc_counts, sc_out, sc_duration, sc_seed, apps_dir);
    if (*trace) return cmd_trace(tr_what, tr_path);
    return kConfigError;
}
