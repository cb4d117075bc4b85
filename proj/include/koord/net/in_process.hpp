#pragma once

#include <random>

#include "koord/net/transport.hpp"

namespace koord::net {

/// Deterministic simulated network driven by the harness clock.
class InProcessTransport final : public Transport {
public:
    InProcessTransport(const NetConfig& cfg, int num_agents);

    int num_agents() const override { return n_; }
    int broadcast(int sender, std::span<const std::uint8_t> payload, double now) override;
    std::vector<Packet> poll(int receiver, double now) override;
    void set_round(std::uint32_t round) override { round_ = round; }
    PacketStats stats() const override { return stats_; }

    std::size_t in_flight() const;

private:
    NetConfig cfg_;
    int n_;
    std::mt19937_64 rng_;
    std::vector<std::vector<Packet>> queues_;
    std::uint64_t seq_ = 0;
    std::uint32_t round_ = 0;
    PacketStats stats_;
};

} // namespace koord::net
