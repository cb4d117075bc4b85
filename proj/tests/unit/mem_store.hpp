#pragma once

#include <map>
#include <utility>
#include <vector>

#include "koord/lang/lower.hpp"

// Plain single-process store: reads and writes go straight to one shared
// vector, so tests can look at the effect of a single event directly.
struct MemStore : koord::lang::StoreAccess {
    std::vector<std::vector<koord::Value>> shared;
    std::vector<koord::Value> locals;
    std::vector<std::pair<std::pair<int, int>, koord::Value>> writes;
    koord::Vec3 psn{};
    bool reached = true;
    koord::PosList actuated;
    koord::PosList planned;

    koord::Value read_shared(int var, int cell) override { return shared.at(var).at(cell); }
    void write_shared(int var, int cell, koord::Value v) override {
        writes.push_back({{var, cell}, v});
        shared.at(var).at(cell) = std::move(v);
    }
    koord::Value& local(int slot) override { return locals.at(slot); }
    koord::Vec3 motion_psn() override { return psn; }
    bool motion_reached() override { return reached; }
    void actuate_route(koord::PosList r) override { actuated = std::move(r); }
    koord::PosList find_path(const koord::Vec3&, const std::vector<koord::PosList>&) override { return planned; }
    bool path_is_clear(const koord::PosList&, const std::vector<koord::PosList>&) override { return true; }
};
