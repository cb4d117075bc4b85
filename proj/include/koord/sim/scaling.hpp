#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "koord/sim/config.hpp"

namespace koord::sim {

/// Quad-fleet config for the formation apps. `app` is `shapeform` or
/// `lineform` (case-insensitive); throws std::invalid_argument otherwise.
SimConfig formation_config(const std::string& app, int n, double duration, std::uint64_t seed, const std::string& apps_dir);

struct ScalingRow {
    int n = 0;
    double packets_per_s = 0.0;  // fleet-wide receptions
    double bytes_per_s = 0.0;
    double receptions_per_round = 0.0;
    std::uint32_t rounds = 0;
    double rt_factor = 0.0;
    bool passed = false;
};

struct ScalingReport {
    std::string app;
    std::vector<ScalingRow> rows;
    std::optional<double> exponent;  // needs at least two distinct counts
};

/// Least-squares slope of log(y) against log(x); nullopt with fewer than
/// two distinct x values or a non-positive sample.
std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

ScalingReport scaling_experiment(const std::string& app, const std::vector<int>& counts, double duration,
                                 std::uint64_t seed, const std::string& apps_dir);

void write_scaling_csv(std::ostream& out, const ScalingReport& r);

} // namespace koord::sim
