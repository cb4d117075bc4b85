#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "koord/lang/checker.hpp"
#include "koord/value.hpp"

namespace koord::lang {

/// Runtime failure inside an effect or precondition (division by zero, list
/// index out of range, double assignment). Halts the offending agent.
class AgentFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// What lowered code sees of an agent: shared cells, locals, Motion ports and
/// the planner-backed builtins. The dsm runtime provides the real one; tests
/// provide simple in-memory versions.
class StoreAccess {
public:
    virtual ~StoreAccess() = default;

    virtual Value read_shared(int var_id, int cell) = 0;
    virtual void write_shared(int var_id, int cell, Value v) = 0;
    virtual Value& local(int slot) = 0;

    virtual Vec3 motion_psn() = 0;
    virtual bool motion_reached() = 0;
    virtual void actuate_route(PosList route) = 0;

    virtual PosList find_path(const Vec3& goal, const std::vector<PosList>& routes) = 0;
    virtual bool path_is_clear(const PosList& path, const std::vector<PosList>& routes) = 0;

    /// Called when `assign` claims entry `index` of shared list `var_id`.
    virtual void on_claim(int /*var_id*/, int /*index*/, int /*claimant*/) {}
};

struct Frame {
    int pid = 0;
    int num_agents = 1;
    StoreAccess* store = nullptr;
};

using ExprFn = std::function<Value(Frame&)>;
using StmtFn = std::function<void(Frame&)>;

struct LoweredEvent {
    std::string name;
    bool atomic = false;
    int index = 0;  // source order; also the atomic arbitration scope id
    ExprFn pre;
    StmtFn eff;

    bool enabled(Frame& f) const { return std::get<bool>(pre(f)); }
};

/// Executable form of a checked program: events in source order plus the
/// variable layout and initializers.
struct EventTable {
    std::vector<VarInfo> shared_vars;
    std::vector<VarInfo> local_vars;
    std::vector<LoweredEvent> events;
    bool uses_motion = false;

    /// Initial shared store: one cell per agent for pid-indexed variables,
    /// one cell otherwise. Initializers run with `pid` bound to the cell
    /// index so every agent starts from the same store.
    std::vector<std::vector<Value>> initial_shared(int num_agents) const;
    std::vector<Value> initial_locals(int pid, int num_agents) const;

    const VarInfo* find_shared(std::string_view name) const;
    const VarInfo* find_local(std::string_view name) const;

    std::vector<ExprFn> shared_init;  // per var_id; empty function: type default
    std::vector<ExprFn> local_init;   // per local slot
};

EventTable lower(const CheckedProgram& checked);

/// Non-negative residue used for every pid-indexed access.
inline int wrap_index(std::int64_t i, int n) {
    auto r = static_cast<int>(i % n);
    return r < 0 ? r + n : r;
}

} // namespace koord::lang
