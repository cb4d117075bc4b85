#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "koord/dsm/arbiter.hpp"
#include "koord/dsm/inbox.hpp"
#include "koord/dsm/store.hpp"
#include "koord/lang/lower.hpp"

namespace koord::dsm {

struct RoundClock {
    std::uint32_t round = 0;
    double delta = 0.1;
    double epoch = 0.0;

    double time_of(std::uint32_t r) const { return epoch + r * delta; }
};

/// A message that arrived more than one round late.
class StaleMessage : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Planner-backed builtins, supplied by whoever hosts the agent.
struct Services {
    std::function<PosList(int pid, const Vec3& goal, const std::vector<PosList>& routes)> find_path;
    std::function<bool(int pid, const PosList& path, const std::vector<PosList>& routes)> path_is_clear;
};

struct MotionPorts {
    Vec3 psn;
    bool reached = true;
};

struct Claim {
    int var_id;
    int index;
    int claimant;
};

/// One agent's round-synchronous runtime. The host drives the phases in
/// order: begin_round, select_event, (intent / arbitrate / grant),
/// execute_effect, commit_round.
class Agent final : private lang::StoreAccess {
public:
    Agent(int pid, int num_agents, std::shared_ptr<const lang::EventTable> table, Services services = {},
          const Arbiter* arbiter = nullptr);

    int pid() const { return pid_; }
    std::uint32_t round() const { return clock_.round; }
    const SharedStore& store() const { return store_; }
    SharedStore& store() { return store_; }
    const std::vector<Value>& locals() const { return locals_; }
    RoundClock& clock() { return clock_; }

    /// Thread-safe; called by the transport side.
    void deliver(UpdateMsg m) { inbox_.push(std::move(m)); }

    /// Applies every write from earlier rounds and latches the Motion ports.
    /// Throws StaleMessage for writes older than the tolerance window.
    void begin_round(const MotionPorts& ports);

    /// First event in source order whose precondition holds, or null.
    const lang::LoweredEvent* select_event();
    const lang::LoweredEvent* selected() const { return selected_; }

    /// Intent message for the selected event, if it is atomic.
    std::optional<UpdateMsg> intent() const;

    /// Collects competing intents for this round and consults the arbiter.
    /// A losing agent drops its selected event.
    bool arbitrate();
    std::optional<UpdateMsg> grant() const;
    bool granted() const { return granted_; }

    /// Runs the selected (and granted) event. Returns the event name or an
    /// empty string when nothing ran. Lets lang::AgentFault propagate.
    std::string execute_effect();

    /// Route actuated by the last effect, if any.
    const std::optional<PosList>& actuated() const { return actuated_; }
    const std::vector<Claim>& claims() const { return claims_; }

    /// One write message per distinct buffered cell; clears the buffer and
    /// advances the round.
    std::vector<UpdateMsg> commit_round();

    /// Grants by others seen for a (round, scope) this agent also won.
    int exclusivity_violations() const { return exclusivity_violations_; }
    /// Same-cell same-round writes by different senders, formatted for traces.
    std::vector<std::string> take_conflicts() { return std::exchange(conflicts_, {}); }
    /// Grants received since the last call: (sender, round, scope).
    std::vector<UpdateMsg> take_grants() { return std::exchange(grants_seen_, {}); }

    /// Value as this agent currently sees it (own buffered writes included).
    Value read(int var_id, int cell) { return read_shared(var_id, cell); }

private:
    Value read_shared(int var_id, int cell) override;
    void write_shared(int var_id, int cell, Value v) override;
    Value& local(int slot) override { return locals_.at(static_cast<std::size_t>(slot)); }
    Vec3 motion_psn() override { return ports_.psn; }
    bool motion_reached() override { return ports_.reached; }
    void actuate_route(PosList route) override { actuated_ = std::move(route); }
    PosList find_path(const Vec3& goal, const std::vector<PosList>& routes) override;
    bool path_is_clear(const PosList& path, const std::vector<PosList>& routes) override;
    void on_claim(int var_id, int index, int claimant) override { claims_.push_back({var_id, index, claimant}); }

    void sort_inbox();

    int pid_;
    int num_agents_;
    std::shared_ptr<const lang::EventTable> table_;
    Services services_;
    const Arbiter* arbiter_;
    LowestPidArbiter default_arbiter_;

    RoundClock clock_;
    SharedStore store_;
    std::vector<Value> locals_;
    Inbox inbox_;
    std::vector<UpdateMsg> pending_;  // writes for rounds not yet due
    std::map<std::pair<std::uint32_t, int>, std::vector<int>> intents_;
    std::map<std::pair<std::uint32_t, int>, bool> won_;

    MotionPorts ports_;
    const lang::LoweredEvent* selected_ = nullptr;
    bool granted_ = false;
    std::map<std::pair<int, int>, Value> buffer_;
    std::vector<std::pair<int, int>> buffer_order_;
    std::optional<PosList> actuated_;
    std::vector<Claim> claims_;
    std::vector<std::string> conflicts_;
    std::vector<UpdateMsg> grants_seen_;
    int exclusivity_violations_ = 0;
};

} // namespace koord::dsm
