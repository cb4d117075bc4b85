#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "koord/motion/vehicle.hpp"
#include "koord/net/transport.hpp"
#include "koord/planner/planner.hpp"
#include "koord/sim/config_text.hpp"

namespace koord::sim {

struct DeviceConfig {
    std::string bot_name;
    motion::VehicleModel model;
    planner::PlannerKind planner = planner::PlannerKind::RrtCar;
};

struct RobotConfig {
    int pid = 0;
    std::string on_device;
    motion::Pose start;
    std::string motion_automaton;
    int port = 0;
};

struct SimConfig {
    std::string app = "custom";
    std::string program_path;    // resolved against the config file's directory
    std::string program_source;  // filled by load_config
    int num_robots = 0;
    double delta = 0.1;
    double dt = 0.01;
    double duration = 60.0;
    std::uint64_t seed = 1;
    double eps_v = 0.2;
    double delta_v = 1.0;
    bool halt_on_violation = false;
    net::NetConfig net;
    planner::Workspace workspace;
    planner::RrtParams rrt;
    std::vector<Vec3> tasks;
    std::vector<DeviceConfig> devices;
    std::vector<RobotConfig> robots;  // sorted by pid

    const DeviceConfig& device_of(const RobotConfig& r) const;
    int steps_per_round() const;

    /// Resolved settings, one `key: value` per line, for trace headers.
    std::vector<std::string> describe() const;
};

/// Parses and validates config text. `base_dir` resolves relative program
/// paths; the program file itself is not read.
SimConfig parse_config(const std::string& text, const std::string& base_dir = ".");

/// Reads the file, parses it, and loads the program source.
SimConfig load_config(const std::string& path);

/// Cross-field checks (pids 0..N-1, devices exist, delta multiple of dt,
/// starts in bounds). Throws ConfigError.
void validate(const SimConfig& cfg);

} // namespace koord::sim
