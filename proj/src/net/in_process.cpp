#include "koord/net/in_process.hpp"

#include <algorithm>
#include <stdexcept>

namespace koord::net {

namespace {

void bump(std::vector<std::uint64_t>& hist, std::uint32_t round, std::uint64_t by) {
    if (hist.size() <= round) hist.resize(round + 1, 0);
    hist[round] += by;
}

} // namespace

InProcessTransport::InProcessTransport(const NetConfig& cfg, int num_agents)
    : cfg_(cfg), n_(num_agents), rng_(cfg.seed), queues_(static_cast<std::size_t>(num_agents)) {
    if (num_agents <= 0) throw std::invalid_argument("transport needs at least one agent");
    if (cfg.loss_prob < 0.0 || cfg.loss_prob > 1.0) throw std::invalid_argument("loss_prob must be in [0, 1]");
    if (cfg.delay_min < 0.0 || cfg.delay_max < cfg.delay_min) throw std::invalid_argument("bad delay bounds");
    stats_.per_pid.resize(static_cast<std::size_t>(num_agents));
}

int InProcessTransport::broadcast(int sender, std::span<const std::uint8_t> payload, double now) {
    if (sender < 0 || sender >= n_) throw std::out_of_range("sender pid out of range");
    auto& s = stats_.per_pid[static_cast<std::size_t>(sender)];
    ++s.packets_sent;
    s.bytes_sent += payload.size();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int delivered = 0;
    for (int r = 0; r < n_; ++r) {
        if (r == sender) continue;
        if (cfg_.loss_prob > 0.0 && unit(rng_) < cfg_.loss_prob) {
            ++s.dropped;
            continue;
        }
        double delay = cfg_.delay_min;
        if (cfg_.delay_max > cfg_.delay_min) delay += (cfg_.delay_max - cfg_.delay_min) * unit(rng_);
        queues_[static_cast<std::size_t>(r)].push_back(
            Packet{sender, std::vector<std::uint8_t>(payload.begin(), payload.end()), now + delay, seq_++});
        ++delivered;
    }
    return delivered;
}

std::vector<Packet> InProcessTransport::poll(int receiver, double now) {
    auto& q = queues_.at(static_cast<std::size_t>(receiver));
    // tolerance for accumulated floating error in the caller's clock
    const double due = now + 1e-9;
    auto split = std::stable_partition(q.begin(), q.end(), [due](const Packet& p) { return p.deliver_at <= due; });
    std::vector<Packet> out(std::make_move_iterator(q.begin()), std::make_move_iterator(split));
    q.erase(q.begin(), split);
    std::sort(out.begin(), out.end(), [](const Packet& a, const Packet& b) {
        if (a.deliver_at != b.deliver_at) return a.deliver_at < b.deliver_at;
        if (a.sender != b.sender) return a.sender < b.sender;
        return a.seq < b.seq;
    });
    auto& s = stats_.per_pid[static_cast<std::size_t>(receiver)];
    for (const auto& p : out) {
        ++s.packets_received;
        s.bytes_received += p.bytes.size();
        bump(stats_.bytes_per_round, round_, p.bytes.size());
    }
    bump(stats_.received_per_round, round_, out.size());
    return out;
}

std::size_t InProcessTransport::in_flight() const {
    std::size_t n = 0;
    for (const auto& q : queues_) n += q.size();
    return n;
}

} // namespace koord::net
