#include "koord/net/transport.hpp"

#include <numeric>
#include <stdexcept>

#include "koord/net/in_process.hpp"
#include "koord/net/udp.hpp"

namespace koord::net {

std::string to_string(NetMode m) {
    return m == NetMode::Udp ? "udp" : "in_process";
}

NetMode parse_net_mode(const std::string& s) {
    if (s == "in_process") return NetMode::InProcess;
    if (s == "udp") return NetMode::Udp;
    throw std::invalid_argument("unknown net mode '" + s + "' (expected in_process or udp)");
}

namespace {

template <typename F>
std::uint64_t sum(const std::vector<PidStats>& v, F f) {
    return std::accumulate(v.begin(), v.end(), std::uint64_t{0}, [&](std::uint64_t acc, const PidStats& s) { return acc + f(s); });
}

} // namespace

std::uint64_t PacketStats::total_received() const {
    return sum(per_pid, [](const PidStats& s) { return s.packets_received; });
}
std::uint64_t PacketStats::total_bytes_received() const {
    return sum(per_pid, [](const PidStats& s) { return s.bytes_received; });
}
std::uint64_t PacketStats::total_sent() const {
    return sum(per_pid, [](const PidStats& s) { return s.packets_sent; });
}
std::uint64_t PacketStats::total_dropped() const {
    return sum(per_pid, [](const PidStats& s) { return s.dropped; });
}
std::uint64_t PacketStats::total_errors() const {
    return sum(per_pid, [](const PidStats& s) { return s.errors; });
}

std::unique_ptr<Transport> make_transport(const NetConfig& cfg, int num_agents) {
    if (cfg.mode == NetMode::Udp) return std::make_unique<UdpTransport>(cfg, num_agents);
    return std::make_unique<InProcessTransport>(cfg, num_agents);
}

} // namespace koord::net
