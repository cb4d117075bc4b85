#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace koord::dsm {

/// Decides which of the agents that announced an atomic intent for one
/// scope in one round may run its event.
class Arbiter {
public:
    virtual ~Arbiter() = default;
    virtual bool granted(int self, std::uint32_t round, int scope, const std::vector<int>& contenders) const = 0;
};

class LowestPidArbiter final : public Arbiter {
public:
    bool granted(int self, std::uint32_t, int, const std::vector<int>& contenders) const override {
        return std::all_of(contenders.begin(), contenders.end(), [self](int p) { return self <= p; });
    }
};

/// Grants everyone. Only for exercising the exclusivity monitors.
class GrantAllArbiter final : public Arbiter {
public:
    bool granted(int, std::uint32_t, int, const std::vector<int>&) const override { return true; }
};

} // namespace koord::dsm
