#include "koord/dsm/agent.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace koord::dsm {

namespace {

bool msg_order(const UpdateMsg& a, const UpdateMsg& b) {
    return std::tie(a.round, a.sender, a.var_id, a.index) < std::tie(b.round, b.sender, b.var_id, b.index);
}

} // namespace

Agent::Agent(int pid, int num_agents, std::shared_ptr<const lang::EventTable> table, Services services,
             const Arbiter* arbiter)
    : pid_(pid),
      num_agents_(num_agents),
      table_(std::move(table)),
      services_(std::move(services)),
      arbiter_(arbiter ? arbiter : &default_arbiter_),
      store_(table_->shared_vars, table_->initial_shared(num_agents)),
      locals_(table_->initial_locals(pid, num_agents)) {}

void Agent::sort_inbox() {
    for (auto& m : inbox_.drain()) {
        switch (m.kind) {
            case MsgKind::Write: pending_.push_back(std::move(m)); break;
            case MsgKind::AtomicIntent:
                if (m.round >= clock_.round) intents_[{m.round, m.var_id}].push_back(m.sender);
                break;
            case MsgKind::AtomicGrant:
                if (won_.count({m.round, m.var_id}) && m.sender != pid_) ++exclusivity_violations_;
                grants_seen_.push_back(std::move(m));
                break;
        }
    }
}

void Agent::begin_round(const MotionPorts& ports) {
    const std::uint32_t r = clock_.round;
    sort_inbox();

    std::vector<UpdateMsg> due;
    std::vector<UpdateMsg> later;
    for (auto& m : pending_) (m.round < r ? due : later).push_back(std::move(m));
    pending_ = std::move(later);
    std::sort(due.begin(), due.end(), msg_order);

    std::optional<UpdateMsg> stale;
    for (const auto& m : due) {
        // one round late is tolerated
        if (m.round + 2 < r) {
            if (!stale) stale = m;
            continue;
        }
        bool conflict = false;
        store_.apply(m, &conflict);
        if (conflict) {
            conflicts_.push_back(fmt::format("conflict var {} index {} round {} sender {}", m.var_id, m.index, m.round, m.sender));
        }
    }
    if (r >= 3) store_.forget_before(r - 3);
    std::erase_if(intents_, [r](const auto& kv) { return kv.first.first < r; });
    std::erase_if(won_, [r](const auto& kv) { return kv.first.first + 2 < r; });

    ports_ = ports;
    selected_ = nullptr;
    granted_ = false;
    actuated_.reset();
    claims_.clear();
    buffer_.clear();
    buffer_order_.clear();

    if (stale) {
        throw StaleMessage(fmt::format("stale write from pid {} for round {} received in round {}", stale->sender,
                                       stale->round, r));
    }
}

const lang::LoweredEvent* Agent::select_event() {
    lang::Frame f{pid_, num_agents_, this};
    selected_ = nullptr;
    for (const auto& ev : table_->events) {
        if (ev.enabled(f)) {
            selected_ = &ev;
            break;
        }
    }
    granted_ = selected_ && !selected_->atomic;
    return selected_;
}

std::optional<UpdateMsg> Agent::intent() const {
    if (!selected_ || !selected_->atomic) return std::nullopt;
    UpdateMsg m;
    m.kind = MsgKind::AtomicIntent;
    m.sender = pid_;
    m.round = clock_.round;
    m.var_id = selected_->index;
    return m;
}

bool Agent::arbitrate() {
    sort_inbox();
    if (!selected_) return false;
    if (!selected_->atomic) return granted_ = true;
    std::vector<int> contenders = intents_[{clock_.round, selected_->index}];
    contenders.push_back(pid_);
    granted_ = arbiter_->granted(pid_, clock_.round, selected_->index, contenders);
    if (granted_) {
        won_[{clock_.round, selected_->index}] = true;
    } else {
        selected_ = nullptr;
    }
    return granted_;
}

std::optional<UpdateMsg> Agent::grant() const {
    if (!selected_ || !selected_->atomic || !granted_) return std::nullopt;
    UpdateMsg m;
    m.kind = MsgKind::AtomicGrant;
    m.sender = pid_;
    m.round = clock_.round;
    m.var_id = selected_->index;
    return m;
}

std::string Agent::execute_effect() {
    if (!selected_ || !granted_) return {};
    lang::Frame f{pid_, num_agents_, this};
    try {
        selected_->eff(f);
    } catch (...) {
        buffer_.clear();
        buffer_order_.clear();
        actuated_.reset();
        claims_.clear();
        throw;
    }
    return selected_->name;
}

std::vector<UpdateMsg> Agent::commit_round() {
    std::vector<UpdateMsg> out;
    out.reserve(buffer_order_.size());
    for (const auto& key : buffer_order_) {
        UpdateMsg m;
        m.kind = MsgKind::Write;
        m.sender = pid_;
        m.round = clock_.round;
        m.var_id = key.first;
        m.index = store_.var(key.first).indexed_by_pid ? key.second : -1;
        m.value = buffer_.at(key);
        pending_.push_back(m);
        out.push_back(std::move(m));
    }
    buffer_.clear();
    buffer_order_.clear();
    ++clock_.round;
    return out;
}

Value Agent::read_shared(int var_id, int cell) {
    auto it = buffer_.find({var_id, cell});
    if (it != buffer_.end()) return it->second;
    return store_.get(var_id, cell);
}

void Agent::write_shared(int var_id, int cell, Value v) {
    auto key = std::make_pair(var_id, cell);
    auto [it, inserted] = buffer_.insert_or_assign(key, std::move(v));
    if (inserted) buffer_order_.push_back(key);
}

PosList Agent::find_path(const Vec3& goal, const std::vector<PosList>& routes) {
    if (!services_.find_path) throw lang::AgentFault("findPath is not available on this host");
    return services_.find_path(pid_, goal, routes);
}

bool Agent::path_is_clear(const PosList& path, const std::vector<PosList>& routes) {
    if (!services_.path_is_clear) throw lang::AgentFault("pathIsClear is not available on this host");
    return services_.path_is_clear(pid_, path, routes);
}

} // namespace koord::dsm
