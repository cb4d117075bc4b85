#include "koord/dsm/store.hpp"

#include <fmt/format.h>

namespace koord::dsm {

SharedStore::SharedStore(std::vector<lang::VarInfo> vars, std::vector<std::vector<Value>> initial)
    : vars_(std::move(vars)) {
    cells_.resize(initial.size());
    for (std::size_t v = 0; v < initial.size(); ++v) {
        for (auto& value : initial[v]) cells_[v].push_back(Cell{std::move(value)});
    }
}

SharedStore::Outcome SharedStore::apply(const UpdateMsg& m, bool* conflict) {
    if (conflict) *conflict = false;
    if (m.var_id < 0 || m.var_id >= num_vars()) throw WireError(fmt::format("unknown var_id {}", m.var_id));
    int cell_index = m.index < 0 ? 0 : m.index;
    if (cell_index >= num_cells(m.var_id)) throw WireError(fmt::format("index {} out of range for var {}", m.index, m.var_id));
    if (type_of(m.var_id) != koord::type_of(m.value)) throw WireError(fmt::format("type mismatch for var {}", m.var_id));

    if (!applied_.emplace(m.round, m.sender, m.var_id, m.index).second) return Outcome::Duplicate;

    auto& cell = cells_[static_cast<std::size_t>(m.var_id)][static_cast<std::size_t>(cell_index)];
    if (cell.written && cell.round == m.round && cell.sender != m.sender && conflict) *conflict = true;
    bool wins = !cell.written || m.round > cell.round || (m.round == cell.round && m.sender <= cell.sender);
    if (!wins) return Outcome::Superseded;
    cell.value = m.value;
    cell.written = true;
    cell.round = m.round;
    cell.sender = m.sender;
    return Outcome::Applied;
}

void SharedStore::forget_before(std::uint32_t round) {
    applied_.erase(applied_.begin(), applied_.lower_bound({round, -1, -1, -2}));
}

std::vector<std::vector<Value>> SharedStore::values() const {
    std::vector<std::vector<Value>> out;
    for (const auto& var : cells_) {
        auto& column = out.emplace_back();
        for (const auto& c : var) column.push_back(c.value);
    }
    return out;
}

} // namespace koord::dsm
