#pragma once

#include <atomic>
#include <mutex>
#include <random>
#include <thread>

#include "koord/net/transport.hpp"

namespace koord::net {

/// Loopback UDP: one socket per agent, broadcast emulated by unicast to
/// every peer's port, one receive thread per agent.
class UdpTransport final : public Transport {
public:
    UdpTransport(const NetConfig& cfg, int num_agents);
    ~UdpTransport() override;

    UdpTransport(const UdpTransport&) = delete;
    UdpTransport& operator=(const UdpTransport&) = delete;

    int num_agents() const override { return n_; }
    int broadcast(int sender, std::span<const std::uint8_t> payload, double now) override;
    std::vector<Packet> poll(int receiver, double now) override;
    void settle(double max_wait) override;
    void set_round(std::uint32_t round) override { round_ = round; }
    PacketStats stats() const override;

    const std::vector<int>& ports() const { return ports_; }

private:
    void receive_loop(int pid);
    int pid_of_port(int port) const;

    NetConfig cfg_;
    int n_;
    std::vector<int> fds_;
    std::vector<int> ports_;
    std::vector<std::thread> threads_;
    std::atomic<bool> stop_{false};
    std::atomic<std::uint32_t> round_{0};

    mutable std::mutex mu_;
    std::vector<std::vector<Packet>> queues_;
    PacketStats stats_;
    std::uint64_t expected_ = 0;  // copies sent successfully
    std::uint64_t arrived_ = 0;
    std::uint64_t seq_ = 0;
    std::mt19937_64 rng_;
};

} // namespace koord::net
