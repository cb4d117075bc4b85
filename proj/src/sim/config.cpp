#include "koord/sim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace koord::sim {

namespace fs = std::filesystem;

const DeviceConfig& SimConfig::device_of(const RobotConfig& r) const {
    for (const auto& d : devices) {
        if (d.bot_name == r.on_device) return d;
    }
    throw ConfigError(fmt::format("robot[{}].on_device", r.pid), fmt::format("unknown device '{}'", r.on_device));
}

int SimConfig::steps_per_round() const {
    return static_cast<int>(std::lround(delta / dt));
}

namespace {

std::string trim(std::string s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

double to_double(const std::string& path, const std::string& s) {
    std::string t = trim(s);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(path, fmt::format("expected a number, found '{}'", s));
    }
    return v;
}

long long to_int(const std::string& path, const std::string& s) {
    std::string t = trim(s);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(path, fmt::format("expected an integer, found '{}'", s));
    }
    return v;
}

// `1, 2, 3` and `[1, 2, 3]` read the same
std::string vector_text(const ConfigNode& c) {
    if (!c.value.empty() || c.items.empty()) return c.value;
    std::string out;
    for (const auto& i : c.items) out += (out.empty() ? "" : ", ") + i;
    return out;
}

bool to_bool(const std::string& path, const std::string& s) {
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw ConfigError(path, fmt::format("expected true or false, found '{}'", s));
}

std::vector<double> to_numbers(const std::string& path, const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(to_double(path, part));
    return out;
}

Vec3 to_vec3(const std::string& path, const std::string& s) {
    auto v = to_numbers(path, s);
    if (v.size() != 3) throw ConfigError(path, fmt::format("expected 'x, y, z', found '{}'", s));
    return {v[0], v[1], v[2]};
}

planner::Box to_box(const std::string& path, const std::string& s) {
    auto v = to_numbers(path, s);
    if (v.size() != 6) throw ConfigError(path, "expected 'x0, y0, z0, x1, y1, z1'");
    planner::Box b{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
    if (b.lo.x > b.hi.x || b.lo.y > b.hi.y || b.lo.z > b.hi.z) throw ConfigError(path, "box corners out of order");
    return b;
}

// Walks a node's children, rejecting unknown keys.
class Fields {
public:
    Fields(const ConfigNode& n, std::string path) : n_(n), path_(std::move(path)) {}

    template <typename F>
    void each(const std::set<std::string>& known, F&& f) const {
        for (const auto& c : n_.children) {
            if (!known.count(c.key) && !ignorable(c.key)) {
                throw ConfigError(join(c.key), fmt::format("unknown key (line {})", c.line));
            }
            f(c, join(c.key));
        }
    }

    std::string join(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

private:
    static bool ignorable(const std::string& k) {
        return k.size() > 6 && k.compare(k.size() - 6, 6, "_topic") == 0;
    }
    const ConfigNode& n_;
    std::string path_;
};

DeviceConfig parse_device(const ConfigNode& n, const std::string& path) {
    DeviceConfig d;
    bool have_type = false;
    std::optional<std::string> planner_name;
    Fields(n, path).each({"bot_name", "bot_type", "planner", "wheelbase", "v_max", "steer_max", "accel", "eps_reach"},
                         [&](const ConfigNode& c, const std::string& p) {
                             try {
                                 if (c.key == "bot_name") d.bot_name = c.value;
                                 if (c.key == "bot_type") {
                                     d.model.kind = motion::parse_vehicle_kind(c.value);
                                     have_type = true;
                                 }
                                 if (c.key == "planner") planner_name = c.value;
                                 if (c.key == "wheelbase") d.model.wheelbase = to_double(p, c.value);
                                 if (c.key == "v_max") d.model.v_max = to_double(p, c.value);
                                 if (c.key == "steer_max") d.model.steer_max = to_double(p, c.value);
                                 if (c.key == "accel") d.model.accel = to_double(p, c.value);
                                 if (c.key == "eps_reach") d.model.eps_reach = to_double(p, c.value);
                             } catch (const std::invalid_argument& e) {
                                 throw ConfigError(p, e.what());
                             }
                         });
    if (d.bot_name.empty()) throw ConfigError(path + ".bot_name", "missing");
    if (!have_type) throw ConfigError(path + ".bot_type", "missing");
    if (planner_name) {
        try {
            d.planner = planner::parse_planner_kind(*planner_name);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(path + ".planner", e.what());
        }
    } else {
        d.planner = d.model.kind == motion::VehicleKind::Car ? planner::PlannerKind::RrtSmoothCar
                                                             : planner::PlannerKind::RrtSmoothQuad;
    }
    bool car_planner = planner::path_kind(d.planner) == planner::PathKind::Car;
    if (car_planner != (d.model.kind == motion::VehicleKind::Car)) {
        throw ConfigError(path + ".planner", fmt::format("planner {} does not match bot_type {}", planner::to_string(d.planner),
                                                         motion::to_string(d.model.kind)));
    }
    try {
        d.model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
    return d;
}

RobotConfig parse_robot(const ConfigNode& n, const std::string& path) {
    RobotConfig r;
    bool have_pid = false;
    Fields(n, path).each({"pid", "on_device", "start", "motion_automaton", "port"}, [&](const ConfigNode& c, const std::string& p) {
        if (c.key == "pid") {
            r.pid = static_cast<int>(to_int(p, c.value));
            have_pid = true;
        }
        if (c.key == "on_device") r.on_device = c.value;
        if (c.key == "motion_automaton") r.motion_automaton = c.value;
        if (c.key == "port") r.port = static_cast<int>(to_int(p, c.value));
        if (c.key == "start") {
            auto v = to_numbers(p, vector_text(c));
            if (v.size() != 3 && v.size() != 4) throw ConfigError(p, "expected 'x, y, z[, yaw]'");
            r.start = {v[0], v[1], v[2], v.size() == 4 ? motion::normalize_angle(v[3]) : 0.0};
        }
    });
    if (!have_pid) throw ConfigError(path + ".pid", "missing");
    if (r.on_device.empty()) throw ConfigError(path + ".on_device", "missing");
    return r;
}

void parse_net(const ConfigNode& n, net::NetConfig& cfg) {
    Fields(n, "net").each({"mode", "loss_prob", "delay", "seed", "base_port"}, [&](const ConfigNode& c, const std::string& p) {
        if (c.key == "mode") {
            try {
                cfg.mode = net::parse_net_mode(c.value);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(p, e.what());
            }
        }
        if (c.key == "loss_prob") cfg.loss_prob = to_double(p, c.value);
        if (c.key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(p, c.value));
        if (c.key == "base_port") cfg.base_port = static_cast<int>(to_int(p, c.value));
        if (c.key == "delay") {
            auto v = to_numbers(p, vector_text(c));
            if (v.size() == 1) {
                cfg.delay_min = cfg.delay_max = v[0];
            } else if (v.size() == 2) {
                cfg.delay_min = v[0];
                cfg.delay_max = v[1];
            } else {
                throw ConfigError(p, "expected 'seconds' or 'min, max'");
            }
        }
    });
    if (cfg.loss_prob < 0.0 || cfg.loss_prob > 1.0) throw ConfigError("net.loss_prob", "must be in [0, 1]");
    if (cfg.delay_min < 0.0 || cfg.delay_max < cfg.delay_min) throw ConfigError("net.delay", "invalid delay bounds");
}

} // namespace

SimConfig parse_config(const std::string& text, const std::string& base_dir) {
    ConfigNode root = parse_config_text(text);
    SimConfig cfg;
    bool have_num = false;
    bool net_seed_set = false;
    std::vector<std::pair<const ConfigNode*, std::string>> robot_nodes;
    std::vector<std::pair<const ConfigNode*, std::string>> device_nodes;
    int robot_i = 0;
    int device_i = 0;

    Fields(root, "").each(
        {"app", "program", "num_robots", "delta", "dt", "duration", "seed", "d_s", "eps_v", "delta_v",
         "halt_on_violation", "net", "workspace", "tasks", "robot", "device", "rrt"},
        [&](const ConfigNode& c, const std::string& p) {
            const auto& k = c.key;
            if (k == "app") cfg.app = c.value;
            if (k == "program") cfg.program_path = (fs::path(base_dir) / c.value).lexically_normal().string();
            if (k == "num_robots") {
                cfg.num_robots = static_cast<int>(to_int(p, c.value));
                have_num = true;
            }
            if (k == "delta") cfg.delta = to_double(p, c.value);
            if (k == "dt") cfg.dt = to_double(p, c.value);
            if (k == "duration") cfg.duration = to_double(p, c.value);
            if (k == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(p, c.value));
            if (k == "d_s") cfg.workspace.d_s = to_double(p, c.value);
            if (k == "eps_v") cfg.eps_v = to_double(p, c.value);
            if (k == "delta_v") cfg.delta_v = to_double(p, c.value);
            if (k == "halt_on_violation") cfg.halt_on_violation = to_bool(p, c.value);
            if (k == "net") {
                parse_net(c, cfg.net);
                net_seed_set = c.find("seed") != nullptr;
            }
            if (k == "workspace") {
                Fields(c, p).each({"bounds", "obstacle"}, [&](const ConfigNode& w, const std::string& wp) {
                    if (w.key == "bounds") cfg.workspace.bounds = to_box(wp, vector_text(w));
                    if (w.key == "obstacle") cfg.workspace.obstacles.push_back(to_box(wp, vector_text(w)));
                });
            }
            if (k == "rrt") {
                Fields(c, p).each({"step", "goal_bias", "max_iters", "smooth_rounds"}, [&](const ConfigNode& w, const std::string& wp) {
                    if (w.key == "step") cfg.rrt.step = to_double(wp, w.value);
                    if (w.key == "goal_bias") cfg.rrt.goal_bias = to_double(wp, w.value);
                    if (w.key == "max_iters") cfg.rrt.max_iters = static_cast<int>(to_int(wp, w.value));
                    if (w.key == "smooth_rounds") cfg.rrt.smooth_rounds = static_cast<int>(to_int(wp, w.value));
                });
            }
            if (k == "tasks") {
                if (!c.value.empty() || !c.children.empty()) throw ConfigError(p, "expected a list of '- x, y, z' entries");
                for (std::size_t i = 0; i < c.items.size(); ++i) {
                    cfg.tasks.push_back(to_vec3(fmt::format("tasks[{}]", i), c.items[i]));
                }
            }
            if (k == "robot") robot_nodes.push_back({&c, fmt::format("robot[{}]", robot_i++)});
            if (k == "device") device_nodes.push_back({&c, fmt::format("device[{}]", device_i++)});
        });

    if (!net_seed_set) cfg.net.seed = cfg.seed;
    if (cfg.program_path.empty()) throw ConfigError("program", "missing");
    if (!have_num) throw ConfigError("num_robots", "missing");

    std::set<std::string> names;
    for (const auto& [node, path] : device_nodes) {
        auto d = parse_device(*node, path);
        if (!names.insert(d.bot_name).second) throw ConfigError(path + ".bot_name", fmt::format("duplicate device '{}'", d.bot_name));
        cfg.devices.push_back(std::move(d));
    }
    std::set<int> pids;
    for (const auto& [node, path] : robot_nodes) {
        auto r = parse_robot(*node, path);
        if (!pids.insert(r.pid).second) throw ConfigError(path + ".pid", fmt::format("duplicate pid {}", r.pid));
        cfg.robots.push_back(std::move(r));
    }
    std::sort(cfg.robots.begin(), cfg.robots.end(), [](const auto& a, const auto& b) { return a.pid < b.pid; });
    validate(cfg);
    return cfg;
}

void validate(const SimConfig& cfg) {
    if (cfg.num_robots <= 0) throw ConfigError("num_robots", "must be positive");
    if (!(cfg.delta > 0.0)) throw ConfigError("delta", "must be positive");
    if (!(cfg.dt > 0.0)) throw ConfigError("dt", "must be positive");
    if (!(cfg.duration >= 0.0)) throw ConfigError("duration", "must not be negative");
    double ratio = cfg.delta / cfg.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-6 || std::round(ratio) < 1) {
        throw ConfigError("delta", fmt::format("delta {} is not an integer multiple of dt {}", cfg.delta, cfg.dt));
    }
    if (!(cfg.workspace.d_s > 0.0)) throw ConfigError("d_s", "must be positive");
    if (!(cfg.eps_v > 0.0)) throw ConfigError("eps_v", "must be positive");
    if (!(cfg.delta_v > 0.0)) throw ConfigError("delta_v", "must be positive");
    if (static_cast<int>(cfg.robots.size()) != cfg.num_robots) {
        throw ConfigError("num_robots", fmt::format("num_robots is {} but {} robot blocks are given", cfg.num_robots, cfg.robots.size()));
    }
    for (int i = 0; i < cfg.num_robots; ++i) {
        const auto& r = cfg.robots[static_cast<std::size_t>(i)];
        if (r.pid != i) throw ConfigError(fmt::format("robot[{}].pid", i), fmt::format("pids must be exactly 0..{}", cfg.num_robots - 1));
        const auto& dev = cfg.device_of(r);
        if (!cfg.workspace.free(r.start.position())) {
            throw ConfigError(fmt::format("robot[{}].start", i), "start is outside the workspace or inside an obstacle");
        }
        if (dev.model.kind == motion::VehicleKind::Car && r.start.z != 0.0) {
            throw ConfigError(fmt::format("robot[{}].start", i), "a car must start at z = 0");
        }
    }
    if (cfg.net.mode == net::NetMode::Udp) {
        std::set<int> ports;
        for (const auto& r : cfg.robots) {
            if (r.port != 0 && !ports.insert(r.port).second) {
                throw ConfigError(fmt::format("robot[{}].port", r.pid), fmt::format("port {} used twice", r.port));
            }
        }
    }
    for (std::size_t i = 0; i < cfg.tasks.size(); ++i) {
        if (!cfg.workspace.free(cfg.tasks[i])) throw ConfigError(fmt::format("tasks[{}]", i), "task is outside the workspace or inside an obstacle");
    }
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", fmt::format("cannot open config '{}'", path));
    std::stringstream ss;
    ss << in.rdbuf();
    SimConfig cfg = parse_config(ss.str(), fs::path(path).parent_path().string().empty() ? "." : fs::path(path).parent_path().string());
    std::ifstream prog(cfg.program_path);
    if (!prog) throw ConfigError("program", fmt::format("cannot open program '{}'", cfg.program_path));
    std::stringstream ps;
    ps << prog.rdbuf();
    cfg.program_source = ps.str();
    return cfg;
}

std::vector<std::string> SimConfig::describe() const {
    std::vector<std::string> out;
    auto add = [&](std::string line) { out.push_back(std::move(line)); };
    add(fmt::format("app: {}", app));
    add(fmt::format("program: {}", program_path));
    add(fmt::format("num_robots: {}", num_robots));
    add(fmt::format("delta: {}", delta));
    add(fmt::format("dt: {}", dt));
    add(fmt::format("duration: {}", duration));
    add(fmt::format("seed: {}", seed));
    add(fmt::format("d_s: {}", workspace.d_s));
    add(fmt::format("eps_v: {}", eps_v));
    add(fmt::format("delta_v: {}", delta_v));
    add(fmt::format("halt_on_violation: {}", halt_on_violation));
    add(fmt::format("net: mode {} loss_prob {} delay {} {} seed {}", net::to_string(net.mode), net.loss_prob, net.delay_min,
                    net.delay_max, net.seed));
    const auto& b = workspace.bounds;
    add(fmt::format("workspace.bounds: {}, {}, {}, {}, {}, {}", b.lo.x, b.lo.y, b.lo.z, b.hi.x, b.hi.y, b.hi.z));
    for (const auto& o : workspace.obstacles) {
        add(fmt::format("workspace.obstacle: {}, {}, {}, {}, {}, {}", o.lo.x, o.lo.y, o.lo.z, o.hi.x, o.hi.y, o.hi.z));
    }
    add(fmt::format("rrt: step {} goal_bias {} max_iters {} smooth_rounds {}", rrt.step, rrt.goal_bias, rrt.max_iters,
                    rrt.smooth_rounds));
    for (const auto& d : devices) {
        add(fmt::format("device: {} {} {} wheelbase {} v_max {} steer_max {} accel {} eps_reach {}", d.bot_name,
                        motion::to_string(d.model.kind), planner::to_string(d.planner), d.model.wheelbase, d.model.v_max,
                        d.model.steer_max, d.model.accel, d.model.eps_reach));
    }
    for (const auto& r : robots) {
        add(fmt::format("robot: {} {} start {}, {}, {}, {}", r.pid, r.on_device, r.start.x, r.start.y, r.start.z, r.start.yaw));
    }
    add(fmt::format("tasks: {}", tasks.size()));
    for (const auto& t : tasks) add(fmt::format("task: {}, {}, {}", t.x, t.y, t.z));
    return out;
}

} // namespace koord::sim
