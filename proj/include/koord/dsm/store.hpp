#pragma once

#include <cstdint>
#include <set>
#include <tuple>
#include <vector>

#include "koord/dsm/wire.hpp"
#include "koord/lang/checker.hpp"

namespace koord::dsm {

/// One agent's replica of the shared variables. Cells are overwritten by
/// write messages under a (newer round, then lower sender pid) rule, so
/// concurrent writers to one cell resolve the same way on every replica.
class SharedStore {
public:
    SharedStore() = default;
    SharedStore(std::vector<lang::VarInfo> vars, std::vector<std::vector<Value>> initial);

    const Value& get(int var_id, int cell) const { return cells_.at(static_cast<std::size_t>(var_id)).at(static_cast<std::size_t>(cell)).value; }
    int num_vars() const { return static_cast<int>(cells_.size()); }
    int num_cells(int var_id) const { return static_cast<int>(cells_.at(static_cast<std::size_t>(var_id)).size()); }
    const lang::VarInfo& var(int var_id) const { return vars_.at(static_cast<std::size_t>(var_id)); }
    ValueType type_of(int var_id) const { return var(var_id).type; }

    enum class Outcome { Applied, Duplicate, Superseded };

    /// Applies a write message. Re-applying the same (sender, round, var,
    /// index) is a no-op. `conflict` is set when a different sender already
    /// wrote the same cell in the same round.
    Outcome apply(const UpdateMsg& m, bool* conflict = nullptr);

    /// Forgets idempotence keys older than `round`.
    void forget_before(std::uint32_t round);

    std::vector<std::vector<Value>> values() const;

private:
    struct Cell {
        Value value;
        bool written = false;
        std::uint32_t round = 0;
        int sender = 0;
    };

    std::vector<lang::VarInfo> vars_;
    std::vector<std::vector<Cell>> cells_;
    std::set<std::tuple<std::uint32_t, int, int, int>> applied_;  // (round, sender, var, index)
};

} // namespace koord::dsm
