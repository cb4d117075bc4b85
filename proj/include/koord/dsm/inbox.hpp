#pragma once

#include <deque>
#include <mutex>
#include <vector>

#include "koord/dsm/wire.hpp"

namespace koord::dsm {

/// The only structure touched from outside the agent's own context.
class Inbox {
public:
    void push(UpdateMsg m) {
        std::lock_guard lock(mu_);
        q_.push_back(std::move(m));
    }

    std::vector<UpdateMsg> drain() {
        std::lock_guard lock(mu_);
        std::vector<UpdateMsg> out(std::make_move_iterator(q_.begin()), std::make_move_iterator(q_.end()));
        q_.clear();
        return out;
    }

    std::size_t size() const {
        std::lock_guard lock(mu_);
        return q_.size();
    }

private:
    mutable std::mutex mu_;
    std::deque<UpdateMsg> q_;
};

} // namespace koord::dsm
