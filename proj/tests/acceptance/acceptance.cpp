// One line per criterion: "criterion N: PASS|FAIL  <details>". Exit 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "koord/dsm/agent.hpp"
#include "koord/lang/checker.hpp"
#include "koord/lang/lower.hpp"
#include "koord/lang/parser.hpp"
#include "koord/motion/vehicle.hpp"
#include "koord/net/in_process.hpp"
#include "koord/planner/planner.hpp"
#include "koord/sim/config.hpp"
#include "koord/sim/harness.hpp"
#include "koord/sim/scaling.hpp"

using namespace koord;

namespace {

const std::string kRoot = KOORD_SOURCE_DIR;

// pinned tolerances
constexpr int kTaskSeeds = 10;
constexpr double kTaskWallLimit = 60.0;
constexpr double kSlopeLo = 1.7;
constexpr double kSlopeHi = 2.3;
constexpr int kRandomPrograms = 60;
constexpr int kOracleRounds = 30;
constexpr int kContentionTrials = 20;
constexpr int kContentionRounds = 200;
constexpr int kAveragingRounds = 200;
constexpr double kAveragingSpread = 1e-3;
constexpr int kPlannerInstances = 100;
constexpr double kSampleStep = 1e-2;
constexpr double kDistanceTol = 1e-2;
constexpr double kBehindLimit = 60.0;

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
    if (!ok) ++failures;
    std::cout << fmt::format("criterion {}: {}  {}", n, ok ? "PASS" : "FAIL", detail) << std::endl;
}

std::shared_ptr<lang::EventTable> build(const std::string& src, int n) {
    auto checked = lang::check(lang::parse_source(src), n);
    if (!checked.ok()) throw std::runtime_error("program does not check: " + checked.diagnostics.at(0).message + "\n" + src);
    return std::make_shared<lang::EventTable>(lang::lower(*checked.program));
}

// Lock-step driver over the in-process transport, no motion.
struct Driver {
    std::shared_ptr<lang::EventTable> table;
    std::vector<std::unique_ptr<dsm::Agent>> agents;
    std::unique_ptr<net::Transport> net;
    std::uint32_t round = 0;
    double delta = 0.1;

    Driver(const std::string& src, int n) : table(build(src, n)) {
        for (int p = 0; p < n; ++p) agents.push_back(std::make_unique<dsm::Agent>(p, n, table, dsm::Services{}));
        net = net::make_transport(net::NetConfig{}, n);
    }

    void pump(double t) {
        for (auto& a : agents) {
            for (auto& p : net->poll(a->pid(), t)) {
                a->deliver(dsm::decode(p.bytes, [this](int v) { return table->shared_vars.at(static_cast<std::size_t>(v)).type; }));
            }
        }
    }

    void send(int pid, const dsm::UpdateMsg& m, double t) { net->broadcast(pid, dsm::encode(m), t); }

    // Phases up to and including begin_round.
    void open() {
        double t = round * delta;
        net->set_round(round);
        pump(t);
        for (auto& a : agents) a->begin_round({});
    }

    struct Outcome {
        std::vector<std::string> executed;       // per pid
        std::vector<std::pair<int, int>> grants; // (scope, pid)
    };

    Outcome close() {
        double t = round * delta;
        Outcome o;
        for (auto& a : agents) {
            a->select_event();
            if (auto m = a->intent()) send(a->pid(), *m, t);
        }
        net->settle(delta);
        pump(t);
        for (auto& a : agents) {
            a->arbitrate();
            if (auto g = a->grant()) {
                o.grants.emplace_back(a->selected()->index, a->pid());
                send(a->pid(), *g, t);
            }
            o.executed.push_back(a->execute_effect());
        }
        for (auto& a : agents) {
            for (const auto& m : a->commit_round()) send(a->pid(), m, t);
        }
        net->settle(delta);
        ++round;
        return o;
    }
};

// ---------------------------------------------------------------- 1 and 2

struct TaskStats {
    int runs = 0;
    int complete = 0;
    int visit_fail = 0;
    int safety_fail = 0;
    int faults = 0;
    double worst_wall = 0.0;
    double min_distance = 1e9;
    double mean_completion = 0.0;
};

TaskStats task_sweep(int robots) {
    auto cfg = sim::load_config(fmt::format("{}/configs/task-{}robot.yaml", kRoot, robots));
    TaskStats s;
    double sum = 0.0;
    for (int seed = 1; seed <= kTaskSeeds; ++seed) {
        sim::RunOptions o;
        o.seed = static_cast<std::uint64_t>(seed);
        auto r = sim::run(cfg, o);
        ++s.runs;
        bool all = r.metrics.tasks_completed == 20 && r.metrics.tasks_total == 20 && r.metrics.completion_time.has_value();
        s.complete += all;
        s.visit_fail += !r.visits.pass();
        s.safety_fail += !r.safety.pass();
        s.faults += r.faulted();
        s.worst_wall = std::max(s.worst_wall, r.metrics.wall_time);
        s.min_distance = std::min(s.min_distance, r.safety.min_distance);
        sum += r.metrics.completion_time.value_or(cfg.duration);
    }
    s.mean_completion = sum / s.runs;
    return s;
}

// ---------------------------------------------------------------- 4a

// Random programs over pid-indexed int cells; each agent writes only its own
// cells, so the oracle needs no conflict rule.
struct Ctx {
    int pid;
    int n;
    const std::vector<std::vector<std::int64_t>>* shared;  // committed snapshot
    std::map<int, std::int64_t>* own;                      // this round's own writes, by var
    std::vector<std::int64_t>* locals;
};

using Eval = std::function<std::int64_t(const Ctx&)>;

struct Gen {
    std::mt19937_64 rng;
    std::vector<std::string> shared_names{"x", "w", "y"};
    std::vector<std::string> local_names{"a", "b"};

    explicit Gen(std::uint64_t seed) : rng(seed) {}

    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

    std::pair<std::string, Eval> expr(int depth) {
        int k = pick(0, depth > 0 ? 6 : 3);
        if (k == 0) {
            int c = pick(0, 9);
            return {std::to_string(c), [c](const Ctx&) { return std::int64_t{c}; }};
        }
        if (k == 1) return {"pid", [](const Ctx& c) { return std::int64_t{c.pid}; }};
        if (k == 2) {
            int l = pick(0, 1);
            return {local_names[l], [l](const Ctx& c) { return (*c.locals)[l]; }};
        }
        if (k == 3) {
            int v = pick(0, 2);
            int off = pick(0, 4);
            std::string text = fmt::format("{}[pid + {}]", shared_names[v], off);
            return {text, [v, off](const Ctx& c) {
                        int cell = lang::wrap_index(c.pid + off, c.n);
                        if (cell == c.pid) {
                            auto it = c.own->find(v);
                            if (it != c.own->end()) return it->second;
                        }
                        return (*c.shared)[v][cell];
                    }};
        }
        auto [lt, le] = expr(depth - 1);
        auto [rt, re] = expr(depth - 1);
        if (k == 4) return {"(" + lt + " + " + rt + ")", [le, re](const Ctx& c) { return le(c) + re(c); }};
        if (k == 5) return {"(" + lt + " - " + rt + ")", [le, re](const Ctx& c) { return le(c) - re(c); }};
        return {"(" + lt + " * " + rt + ")", [le, re](const Ctx& c) { return le(c) * re(c); }};
    }

    std::pair<std::string, std::function<bool(const Ctx&)>> cond(int depth) {
        int k = pick(0, depth > 0 ? 4 : 2);
        if (k == 0) {
            auto [lt, le] = expr(1);
            auto [rt, re] = expr(1);
            return {"(" + lt + " < " + rt + ")", [le, re](const Ctx& c) { return le(c) < re(c); }};
        }
        if (k == 1) {
            auto [lt, le] = expr(1);
            int m = pick(2, 3);
            int r = pick(0, m - 1);
            return {fmt::format("({} % {} == {})", lt, m, r), [le, m, r](const Ctx& c) { return le(c) % m == r; }};
        }
        if (k == 2) return {"true", [](const Ctx&) { return true; }};
        auto [lt, le] = cond(depth - 1);
        if (k == 3) return {"(not " + lt + ")", [le](const Ctx& c) { return !le(c); }};
        auto [rt, re] = cond(depth - 1);
        return {"(" + lt + " and " + rt + ")", [le, re](const Ctx& c) { return le(c) && re(c); }};
    }

    using Exec = std::function<void(Ctx&)>;

    std::pair<std::string, Exec> stmt(int depth, const std::string& pad) {
        int k = pick(0, depth > 0 ? 3 : 2);
        if (k <= 1) {
            // own shared cell (y is allread: only the owner writes it anyway)
            int v = pick(0, 2);
            auto [et, ee] = expr(2);
            return {fmt::format("{}{}[pid] = {} % 1009\n", pad, shared_names[v], et),
                    [v, ee](Ctx& c) { (*c.own)[v] = ee(c) % 1009; }};
        }
        if (k == 2) {
            int l = pick(0, 1);
            auto [et, ee] = expr(2);
            return {fmt::format("{}{} = {} % 1009\n", pad, local_names[l], et), [l, ee](Ctx& c) { (*c.locals)[l] = ee(c) % 1009; }};
        }
        auto [ct, ce] = cond(1);
        auto [tt, te] = body(depth - 1, pad + "    ");
        auto [ft, fe] = body(depth - 1, pad + "    ");
        std::string text = pad + "if " + ct + " {\n" + tt + pad + "} else {\n" + ft + pad + "}\n";
        return {text, [ce, te, fe](Ctx& c) {
                    if (ce(c)) te(c);
                    else fe(c);
                }};
    }

    std::pair<std::string, Exec> body(int depth, const std::string& pad) {
        int count = pick(1, 3);
        std::string text;
        std::vector<Exec> parts;
        for (int i = 0; i < count; ++i) {
            auto [t, e] = stmt(depth, pad);
            text += t;
            parts.push_back(e);
        }
        return {text, [parts](Ctx& c) {
                    for (const auto& p : parts) p(c);
                }};
    }
};

struct RandomProgram {
    std::string source;
    std::vector<std::function<bool(const Ctx&)>> pre;
    std::vector<Gen::Exec> eff;
    std::vector<std::string> names;
    std::vector<int> init_mul, init_add;  // shared var v, cell i starts at (i*mul + add) % 11
};

RandomProgram random_program(std::uint64_t seed) {
    Gen g(seed);
    RandomProgram p;
    for (int v = 0; v < 3; ++v) {
        p.init_mul.push_back(g.pick(0, 5));
        p.init_add.push_back(g.pick(0, 9));
    }
    auto init = [&](int v) { return fmt::format("(pid * {} + {}) % 11", p.init_mul[v], p.init_add[v]); };
    p.source = fmt::format("allwrite {{\n    int x[] = {}\n    int w[] = {}\n}}\n\nallread {{\n    int y[] = {}\n}}\n\n", init(0),
                           init(1), init(2));
    p.source += "local {\n    int a = pid\n    int b = 0\n}\n\n";
    int events = g.pick(1, 4);
    for (int e = 0; e < events; ++e) {
        auto [ct, ce] = g.cond(2);
        auto [bt, be] = g.body(1, "        ");
        p.names.push_back(fmt::format("E{}", e));
        p.source += fmt::format("event E{} {{\n    pre: {}\n    eff: {{\n{}    }}\n}}\n\n", e, ct, bt);
        p.pre.push_back(ce);
        p.eff.push_back(be);
    }
    return p;
}

// Single-process oracle: everyone reads the round-r snapshot; own writes are
// visible to the writer at once and to everyone at round r+1.
struct RoundOracle {
    const RandomProgram& prog;
    int n;
    std::vector<std::vector<std::int64_t>> shared;  // [var][cell]
    std::vector<std::vector<std::int64_t>> locals;  // [pid][slot]

    RoundOracle(const RandomProgram& p, int agents) : prog(p), n(agents) {
        shared.assign(3, std::vector<std::int64_t>(static_cast<std::size_t>(n)));
        for (int v = 0; v < 3; ++v) {
            for (int i = 0; i < n; ++i) shared[v][i] = (i * p.init_mul[v] + p.init_add[v]) % 11;
        }
        for (int i = 0; i < n; ++i) locals.push_back({i, 0});
    }

    std::vector<std::string> step() {
        auto next = shared;
        std::vector<std::string> executed;
        for (int pid = 0; pid < n; ++pid) {
            std::map<int, std::int64_t> own;
            Ctx c{pid, n, &shared, &own, &locals[pid]};
            std::string name;
            for (std::size_t e = 0; e < prog.pre.size(); ++e) {
                if (prog.pre[e](c)) {
                    prog.eff[e](c);
                    name = prog.names[e];
                    break;
                }
            }
            for (const auto& [v, val] : own) next[v][pid] = val;
            executed.push_back(name);
        }
        shared = std::move(next);
        return executed;
    }
};

std::string criterion_4a(bool& ok) {
    std::mt19937_64 rng(2024);
    int checks = 0;
    for (int t = 0; t < kRandomPrograms; ++t) {
        int n = std::uniform_int_distribution<int>(1, 5)(rng);
        auto prog = random_program(rng());
        Driver d(prog.source, n);
        RoundOracle o(prog, n);
        int var_id[3];
        const char* names[3] = {"x", "w", "y"};
        for (int v = 0; v < 3; ++v) var_id[v] = d.table->find_shared(names[v])->slot;
        int slot_a = d.table->find_local("a")->slot;
        int slot_b = d.table->find_local("b")->slot;
        for (int r = 0; r < kOracleRounds; ++r) {
            d.open();
            // every agent's snapshot at round r equals the oracle's committed state
            for (int p = 0; p < n; ++p) {
                for (int v = 0; v < 3; ++v) {
                    for (int i = 0; i < n; ++i) {
                        auto got = std::get<std::int64_t>(d.agents[p]->store().get(var_id[v], i));
                        ++checks;
                        if (got != o.shared[v][i]) {
                            ok = false;
                            return fmt::format("program {} round {} pid {} sees {}[{}] = {}, oracle {}\n{}", t, r, p, names[v], i, got,
                                               o.shared[v][i], prog.source);
                        }
                    }
                }
            }
            auto got = d.close();
            auto want = o.step();
            for (int p = 0; p < n; ++p) {
                const auto& loc = d.agents[p]->locals();
                bool same = got.executed[p] == want[p] && std::get<std::int64_t>(loc[slot_a]) == o.locals[p][0] &&
                            std::get<std::int64_t>(loc[slot_b]) == o.locals[p][1];
                ++checks;
                if (!same) {
                    ok = false;
                    return fmt::format("program {} round {} pid {} ran '{}' (oracle '{}')\n{}", t, r, p, got.executed[p], want[p],
                                       prog.source);
                }
            }
        }
    }
    return fmt::format("{} random programs x {} rounds, {} checks against the round oracle", kRandomPrograms, kOracleRounds, checks);
}

// ---------------------------------------------------------------- 4b

std::string criterion_4b(bool& ok) {
    std::vector<std::string> configs{"task-4robot.yaml", "three-robot.yaml", "shapeform-9quad.yaml"};
    for (const auto& name : configs) {
        auto cfg = sim::load_config(kRoot + "/configs/" + name);
        std::string first;
        for (int rep = 0; rep < 3; ++rep) {
            std::ostringstream out;
            sim::RunOptions o;
            o.trace = &out;
            o.seed = 3;
            sim::run(cfg, o);
            if (rep == 0) first = out.str();
            else if (out.str() != first) {
                ok = false;
                return name + ": traces differ between repeated runs";
            }
        }
        if (first.empty()) {
            ok = false;
            return name + ": empty trace";
        }
    }
    return "3 configs x 3 repeated runs, byte-identical traces";
}

// ---------------------------------------------------------------- 5

const char* kContention = R"(allread {
    int s[] = (pid * K1 + K2) % 101
}

atomic event A0 {
    pre: s[pid] % 3 == 0
    eff: {
        s[pid] = (s[pid] * 31 + 7) % 101
    }
}

atomic event A1 {
    pre: s[pid] % 3 == 1
    eff: {
        s[pid] = (s[pid] * 17 + 3) % 101
    }
}

atomic event A2 {
    pre: s[pid] % 3 == 2
    eff: {
        s[pid] = (s[pid] * 13 + 5) % 101
    }
}
)";

std::string criterion_5(bool& ok) {
    std::mt19937_64 rng(77);
    std::int64_t total_grants = 0;
    for (int t = 0; t < kContentionTrials; ++t) {
        int n = std::uniform_int_distribution<int>(2, 8)(rng);
        int k1 = std::uniform_int_distribution<int>(1, 50)(rng);
        int k2 = std::uniform_int_distribution<int>(0, 100)(rng);
        std::string src = kContention;
        src.replace(src.find("K1"), 2, std::to_string(k1));
        src.replace(src.find("K2"), 2, std::to_string(k2));
        Driver d(src, n);
        std::vector<std::int64_t> s(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) s[i] = (static_cast<std::int64_t>(i) * k1 + k2) % 101;
        const std::int64_t mul[3] = {31, 17, 13}, add[3] = {7, 3, 5};
        for (int r = 0; r < kContentionRounds; ++r) {
            d.open();
            auto got = d.close();
            // oracle: every agent intends the scope s[pid] % 3; the lowest pid per scope wins
            std::map<int, int> want;
            for (int i = 0; i < n; ++i) {
                int scope = static_cast<int>(s[i] % 3);
                if (!want.count(scope)) want[scope] = i;
            }
            std::map<int, std::vector<int>> seen;
            for (auto [scope, pid] : got.grants) seen[scope].push_back(pid);
            for (auto& [scope, pids] : seen) {
                if (pids.size() != 1) {
                    ok = false;
                    return fmt::format("trial {} round {} scope {}: {} grants", t, r, scope, pids.size());
                }
            }
            if (seen.size() != want.size()) {
                ok = false;
                return fmt::format("trial {} round {}: {} scopes granted, oracle {}", t, r, seen.size(), want.size());
            }
            for (auto [scope, pid] : want) {
                if (seen[scope].front() != pid) {
                    ok = false;
                    return fmt::format("trial {} round {} scope {}: pid {} granted, oracle pid {}", t, r, scope, seen[scope].front(), pid);
                }
                s[pid] = (s[pid] * mul[scope] + add[scope]) % 101;
                ++total_grants;
            }
            for (int i = 0; i < n; ++i) {
                bool ran = !got.executed[i].empty();
                bool winner = false;
                for (auto [scope, pid] : want) winner |= pid == i;
                if (ran != winner) {
                    ok = false;
                    return fmt::format("trial {} round {} pid {}: ran={} winner={}", t, r, i, ran, winner);
                }
            }
        }
    }
    return fmt::format("{} trials x {} rounds, N in [2, 8], {} grants all match lowest pid", kContentionTrials, kContentionRounds,
                       total_grants);
}

// ---------------------------------------------------------------- 6

std::string criterion_6(bool& ok) {
    std::string src = R"(allwrite {
    float x[] = pid
}

event Average {
    pre: true
    eff: {
        x[pid] = (x[pid-1] + x[pid+1]) / 2
    }
}
)";
    const int n = 5;
    Driver d(src, n);
    int var = d.table->find_shared("x")->slot;
    double prev = 1e18;
    int hit = -1;
    double spread = 0.0;
    for (int r = 0; r <= kAveragingRounds; ++r) {
        d.open();
        std::vector<double> x;
        for (int i = 0; i < n; ++i) x.push_back(std::get<double>(d.agents[0]->store().get(var, i)));
        if (r == 0 && x != std::vector<double>{0, 1, 2, 3, 4}) {
            ok = false;
            return "initial values are not [0, 1, 2, 3, 4]";
        }
        auto [lo, hi] = std::minmax_element(x.begin(), x.end());
        spread = *hi - *lo;
        if (spread > prev) {
            ok = false;
            return fmt::format("spread grew at round {}: {} -> {}", r, prev, spread);
        }
        prev = spread;
        if (hit < 0 && spread < kAveragingSpread) hit = r;
        d.close();
    }
    ok = hit >= 0 && hit <= kAveragingRounds;
    return fmt::format("ring of 5, spread non-increasing, < {:g} at round {}, {:.3g} at round {}", kAveragingSpread, hit, spread,
                       kAveragingRounds);
}

// ---------------------------------------------------------------- 7

bool sampled_free(const planner::Path& path, const planner::Workspace& ws) {
    for (std::size_t i = 1; i < path.size(); ++i) {
        double len = distance(path[i - 1], path[i]);
        int k = std::max(1, static_cast<int>(std::ceil(len / kSampleStep)));
        for (int j = 0; j <= k; ++j) {
            Vec3 p = path[i - 1] + (path[i] - path[i - 1]) * (static_cast<double>(j) / k);
            if (!ws.bounds.contains(p)) return false;
            for (const auto& b : ws.obstacles) {
                if (b.contains(p)) return false;
            }
        }
    }
    return true;
}

double brute_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
    int n = std::max(1, static_cast<int>(std::ceil(distance(p0, p1) / kSampleStep)));
    int m = std::max(1, static_cast<int>(std::ceil(distance(q0, q1) / kSampleStep)));
    double best = 1e18;
    for (int i = 0; i <= n; ++i) {
        Vec3 a = p0 + (p1 - p0) * (static_cast<double>(i) / n);
        for (int j = 0; j <= m; ++j) best = std::min(best, distance(a, q0 + (q1 - q0) * (static_cast<double>(j) / m)));
    }
    return best;
}

std::string criterion_7(bool& ok) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.0, 8.0), uy(0.0, 7.0), uz(0.0, 3.0);
    int returned = 0, collide = 0, longer = 0;
    for (int t = 0; t < kPlannerInstances; ++t) {
        planner::Workspace ws;
        int boxes = std::uniform_int_distribution<int>(1, 5)(rng);
        for (int b = 0; b < boxes; ++b) {
            Vec3 lo{ux(rng) * 0.9, uy(rng) * 0.9, 0.0};
            Vec3 size{0.3 + ux(rng) * 0.2, 0.3 + uy(rng) * 0.2, 0.5 + uz(rng) * 0.8};
            ws.obstacles.push_back({lo, {std::min(lo.x + size.x, 8.0), std::min(lo.y + size.y, 7.0), std::min(size.z, 3.0)}});
        }
        auto kind = t % 2 ? planner::PathKind::Quad : planner::PathKind::Car;
        auto sample = [&] {
            for (;;) {
                Vec3 p{ux(rng), uy(rng), kind == planner::PathKind::Car ? 0.0 : uz(rng)};
                if (ws.free(p)) return p;
            }
        };
        Vec3 a = sample(), b = sample();
        auto path = planner::rrt_plan(a, b, ws, kind, static_cast<std::uint64_t>(t) + 1);
        if (!path) continue;
        ++returned;
        collide += !sampled_free(*path, ws);
        auto s = planner::smooth(*path, ws, static_cast<std::uint64_t>(t) + 100, 100);
        longer += planner::path_length(s) > planner::path_length(*path) + 1e-9 || !sampled_free(s, ws);
    }
    double worst = 0.0;
    std::uniform_real_distribution<double> u2(0.0, 2.0);
    for (int t = 0; t < 100; ++t) {
        Vec3 p0{u2(rng), u2(rng), u2(rng)}, p1{u2(rng), u2(rng), u2(rng)}, q0{u2(rng), u2(rng), u2(rng)}, q1{u2(rng), u2(rng), u2(rng)};
        worst = std::max(worst, std::abs(planner::polyline_distance({p0, p1}, {q0, q1}) - brute_distance(p0, p1, q0, q1)));
    }
    ok = returned > 0 && collide == 0 && longer == 0 && worst <= kDistanceTol;
    return fmt::format("{}/{} plans returned, {} colliding, {} smoothed longer; tube distance max error {:.2e} m", returned,
                       kPlannerInstances, collide, longer, worst);
}

// ---------------------------------------------------------------- 8

std::string criterion_8(bool& ok) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> ux(0.5, 7.5), uy(0.5, 6.5), uz(0.5, 2.5), uyaw(-3.14, 3.14);
    double worst_ratio = 0.0;
    double worst_z = 0.0;
    int latch_breaks = 0;
    int unreached = 0;
    const double dt = 0.01;
    for (int t = 0; t < 40; ++t) {
        motion::VehicleModel m;
        m.kind = t % 2 ? motion::VehicleKind::Quad : motion::VehicleKind::Car;
        bool car = m.kind == motion::VehicleKind::Car;
        motion::MotionState s;
        s.pose = {ux(rng), uy(rng), car ? 0.0 : uz(rng), uyaw(rng)};
        std::vector<Vec3> route;
        int k = std::uniform_int_distribution<int>(1, 4)(rng);
        for (int i = 0; i < k; ++i) route.push_back({ux(rng), uy(rng), car ? 0.0 : uz(rng)});
        motion::set_route(s, m, route);
        bool was_reached = false;
        for (double time = 0; time < 120.0; time += dt) {
            Vec3 before = s.pose.position();
            motion::step(s, m, dt);
            worst_ratio = std::max(worst_ratio, distance(before, s.pose.position()) / (m.v_max * dt));
            if (car) worst_z = std::max(worst_z, std::abs(s.pose.z));
            if (was_reached && !s.reached) ++latch_breaks;
            was_reached = s.reached;
        }
        unreached += !s.reached;
    }
    // a waypoint straight behind the car
    motion::VehicleModel car;
    motion::MotionState s;
    s.pose = {4.0, 3.5, 0.0, 0.0};
    motion::set_route(s, car, {{2.0, 3.5, 0.0}});
    double t_reach = -1;
    for (double time = 0; time <= kBehindLimit; time += dt) {
        motion::step(s, car, dt);
        if (s.reached) {
            t_reach = time + dt;
            break;
        }
    }
    ok = worst_ratio <= 1.0 + 1e-9 && worst_z == 0.0 && latch_breaks == 0 && t_reach > 0;
    return fmt::format("max step/(v_max dt) {:.6f}, car |z| max {}, latch breaks {}, {} of 40 random routes unreached in 120 s, "
                       "behind waypoint reached at {:.2f} s",
                       worst_ratio, worst_z, latch_breaks, unreached, t_reach);
}

} // namespace

int main() {
    std::cout << std::unitbuf;

    // 1 and 2
    TaskStats t2 = task_sweep(2), t3 = task_sweep(3), t4 = task_sweep(4);
    report(1,
           t4.complete == kTaskSeeds && t4.visit_fail == 0 && t4.safety_fail == 0 && t4.faults == 0 && t4.worst_wall < kTaskWallLimit,
           fmt::format("4 robots x {} seeds: {} complete, {} visit failures, {} safety failures, {} faults, min distance {:.3f}, "
                       "worst wall {:.2f} s",
                       kTaskSeeds, t4.complete, t4.visit_fail, t4.safety_fail, t4.faults, t4.min_distance, t4.worst_wall));
    report(2, t4.mean_completion < t3.mean_completion && t3.mean_completion < t2.mean_completion,
           fmt::format("mean completion over {} seeds: T(4) {:.2f} s, T(3) {:.2f} s, T(2) {:.2f} s", kTaskSeeds, t4.mean_completion,
                       t3.mean_completion, t2.mean_completion));

    // 3
    auto sc = sim::scaling_experiment("shapeform", {2, 4, 8, 16}, 10.0, 1, kRoot + "/apps");
    std::string rows;
    for (const auto& r : sc.rows) rows += fmt::format(" N={}:{:.0f}/s", r.n, r.packets_per_s);
    bool ok3 = sc.exponent && *sc.exponent >= kSlopeLo && *sc.exponent <= kSlopeHi;
    report(3, ok3, fmt::format("fitted exponent {} in [{}, {}];{}", sc.exponent ? fmt::format("{:.3f}", *sc.exponent) : "N/A", kSlopeLo,
                               kSlopeHi, rows));

    // 4
    bool ok4a = true, ok4b = true;
    std::string d4a, d4b;
    try {
        d4a = criterion_4a(ok4a);
    } catch (const std::exception& e) {
        ok4a = false;
        d4a = e.what();
    }
    try {
        d4b = criterion_4b(ok4b);
    } catch (const std::exception& e) {
        ok4b = false;
        d4b = e.what();
    }
    report(4, ok4a && ok4b, "(a) " + d4a + "; (b) " + d4b);

    auto guarded = [](int n, std::string (*f)(bool&)) {
        bool ok = true;
        std::string detail;
        try {
            detail = f(ok);
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        report(n, ok, detail);
    };
    guarded(5, criterion_5);
    guarded(6, criterion_6);
    guarded(7, criterion_7);
    guarded(8, criterion_8);

    // 9
    auto cfg = sim::formation_config("shapeform", 16, 30.0, 1, kRoot + "/apps");
    auto r = sim::run(cfg);
    bool ok9 = !r.faulted() && (r.metrics.stop_reason == "duration" || r.metrics.stop_reason == "complete");
    report(9, ok9,
           fmt::format("16 quads, {} rounds, stop {}, faults {}, RT factor {:.1f}, fleet {:.0f} packets/s", r.metrics.rounds,
                       r.metrics.stop_reason, r.faults.size(), r.metrics.rt_factor, r.metrics.fleet_packets_per_s));

    std::cout << fmt::format("{} of 9 criteria failed", failures) << std::endl;
    return failures == 0 ? 0 : 1;
}
