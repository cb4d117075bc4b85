#include "koord/sim/scaling.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <set>

#include <fmt/format.h>

#include "koord/sim/harness.hpp"

namespace koord::sim {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Same perimeter stations as the shapeform program.
Vec3 station(int pid, int n) {
    double s = 16.0 * pid / n;
    if (s < 4) return {2 + s, 1.5, 1.5};
    if (s < 8) return {6, s - 2.5, 1.5};
    if (s < 12) return {14 - s, 5.5, 1.5};
    return {2, 17.5 - s, 1.5};
}

} // namespace

SimConfig formation_config(const std::string& app, int n, double duration, std::uint64_t seed, const std::string& apps_dir) {
    std::string a = lower(app);
    if (a != "shapeform" && a != "lineform") throw std::invalid_argument(fmt::format("unknown formation app '{}'", app));
    if (n < 1) throw std::invalid_argument("robot count must be positive");
    SimConfig cfg;
    cfg.app = a;
    cfg.program_path = (std::filesystem::path(apps_dir) / (a + ".koord")).string();
    cfg.num_robots = n;
    cfg.duration = duration;
    cfg.seed = seed;
    cfg.net.seed = seed;
    DeviceConfig quad;
    quad.bot_name = "quad";
    quad.model.kind = motion::VehicleKind::Quad;
    quad.planner = planner::PlannerKind::RrtQuad;
    cfg.devices.push_back(quad);
    const Vec3 centre{4.0, 3.5, 0.0};
    const Vec3 a0{1.0, 1.0, 0.5};
    const Vec3 a1{7.0, 6.0, 2.5};
    for (int p = 0; p < n; ++p) {
        RobotConfig r;
        r.pid = p;
        r.on_device = "quad";
        Vec3 s;
        if (a == "shapeform") {
            Vec3 st = station(p, n);
            s = {centre.x + 0.6 * (st.x - centre.x), centre.y + 0.6 * (st.y - centre.y), 0.0};
        } else {
            double f = n == 1 ? 0.0 : static_cast<double>(p) / (n - 1);
            double wobble = (p % 2 ? 0.05 : -0.05) * (p > 0 && p < n - 1);
            s = {a0.x + f * (a1.x - a0.x) + wobble, a0.y + f * (a1.y - a0.y) - wobble, a0.z + f * (a1.z - a0.z)};
        }
        r.start = {s.x, s.y, s.z, 0.0};
        cfg.robots.push_back(r);
    }
    return cfg;
}

std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) return std::nullopt;
    std::set<double> distinct(x.begin(), x.end());
    if (distinct.size() < 2) return std::nullopt;
    double mx = 0, my = 0;
    const auto k = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0) || !(y[i] > 0)) return std::nullopt;
        mx += std::log(x[i]) / k;
        my += std::log(y[i]) / k;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

ScalingReport scaling_experiment(const std::string& app, const std::vector<int>& counts, double duration,
                                 std::uint64_t seed, const std::string& apps_dir) {
    ScalingReport rep;
    rep.app = lower(app);
    std::vector<double> xs, ys;
    for (int n : counts) {
        auto res = run(formation_config(app, n, duration, seed, apps_dir));
        ScalingRow row;
        row.n = n;
        row.packets_per_s = res.metrics.fleet_packets_per_s;
        row.bytes_per_s = res.metrics.fleet_bytes_per_s;
        row.receptions_per_round = res.metrics.receptions_per_round;
        row.rounds = res.metrics.rounds;
        row.rt_factor = res.metrics.rt_factor;
        row.passed = res.passed();
        rep.rows.push_back(row);
        xs.push_back(n);
        ys.push_back(row.packets_per_s);
    }
    rep.exponent = loglog_slope(xs, ys);
    return rep;
}

void write_scaling_csv(std::ostream& out, const ScalingReport& r) {
    out << "app,n,packets_per_s,bytes_per_s,receptions_per_round,rounds,passed\n";
    for (const auto& row : r.rows) {
        out << fmt::format("{},{},{:.3f},{:.3f},{:.3f},{},{}\n", r.app, row.n, row.packets_per_s, row.bytes_per_s,
                           row.receptions_per_round, row.rounds, row.passed ? 1 : 0);
    }
    out << "# exponent," << (r.exponent ? fmt::format("{:.4f}", *r.exponent) : std::string("N/A")) << '\n';
}

} // namespace koord::sim
