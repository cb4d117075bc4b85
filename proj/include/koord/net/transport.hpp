#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace koord::net {

enum class NetMode { InProcess, Udp };

struct NetConfig {
    NetMode mode = NetMode::InProcess;
    double loss_prob = 0.0;
    double delay_min = 0.0;  // seconds; equal bounds mean a fixed delay
    double delay_max = 0.0;
    std::uint64_t seed = 1;
    int base_port = 0;       // udp: 0 picks ephemeral ports
    std::vector<int> ports;  // udp: explicit per-pid ports, overrides base_port
};

std::string to_string(NetMode m);
NetMode parse_net_mode(const std::string& s);

struct Packet {
    int sender = 0;
    std::vector<std::uint8_t> bytes;
    double deliver_at = 0.0;
    std::uint64_t seq = 0;
};

struct PidStats {
    std::uint64_t packets_sent = 0;
    std::uint64_t bytes_sent = 0;
    std::uint64_t packets_received = 0;
    std::uint64_t bytes_received = 0;
    std::uint64_t dropped = 0;
    std::uint64_t errors = 0;
};

struct PacketStats {
    std::vector<PidStats> per_pid;
    // fleet-wide receptions and bytes received, indexed by round
    std::vector<std::uint64_t> received_per_round;
    std::vector<std::uint64_t> bytes_per_round;

    std::uint64_t total_received() const;
    std::uint64_t total_bytes_received() const;
    std::uint64_t total_sent() const;
    std::uint64_t total_dropped() const;
    std::uint64_t total_errors() const;
};

/// Broadcast medium between agents 0..N-1. A broadcast reaches every pid
/// except the sender.
class Transport {
public:
    virtual ~Transport() = default;

    virtual int num_agents() const = 0;

    /// Returns how many copies were handed to the medium (after loss).
    virtual int broadcast(int sender, std::span<const std::uint8_t> payload, double now) = 0;

    /// Packets due at `now`, ordered by (delivery time, sender pid).
    virtual std::vector<Packet> poll(int receiver, double now) = 0;

    /// Blocks until everything sent has arrived or `max_wait` wall seconds
    /// pass. No-op for the in-process medium.
    virtual void settle(double /*max_wait*/) {}

    /// Round number used to bucket the per-round histograms.
    virtual void set_round(std::uint32_t round) = 0;

    virtual PacketStats stats() const = 0;
};

std::unique_ptr<Transport> make_transport(const NetConfig& cfg, int num_agents);

} // namespace koord::net
