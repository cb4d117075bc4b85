#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "koord/dsm/arbiter.hpp"
#include "koord/lang/lower.hpp"
#include "koord/sim/config.hpp"
#include "koord/sim/metrics.hpp"
#include "koord/sim/monitors.hpp"

namespace koord::sim {

/// Parses, checks and lowers a program for `num_agents` agents. Throws
/// ConfigError carrying the rendered diagnostics.
std::shared_ptr<lang::EventTable> compile_program(const std::string& source, int num_agents, const std::string& file);

struct RunOptions {
    const dsm::Arbiter* arbiter = nullptr;  // default: lowest pid wins
    std::optional<std::uint64_t> seed;
    std::optional<net::NetMode> net_mode;
    std::optional<bool> halt_on_violation;
    std::ostream* trace = nullptr;
};

struct RunResult {
    Metrics metrics;
    SafetyReport safety;
    VisitReport visits;
    bool has_tasks = false;
    std::vector<std::string> faults;
    bool app_complete = false;

    bool violation() const { return !safety.pass() || (has_tasks && !visits.pass()); }
    bool faulted() const { return !faults.empty(); }
    bool passed() const { return !violation() && !faulted(); }
};

/// Lock-step run on a simulated clock. Loads the program from
/// `program_path` when `program_source` is empty.
RunResult run(SimConfig cfg, const RunOptions& opts = {});

} // namespace koord::sim
