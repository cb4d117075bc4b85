#include "koord/net/udp.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <stdexcept>

#include <fmt/format.h>

namespace koord::net {

namespace {

sockaddr_in loopback(int port) {
    sockaddr_in a{};
    a.sin_family = AF_INET;
    a.sin_port = htons(static_cast<std::uint16_t>(port));
    a.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    return a;
}

void bump(std::vector<std::uint64_t>& hist, std::uint32_t round, std::uint64_t by) {
    if (hist.size() <= round) hist.resize(round + 1, 0);
    hist[round] += by;
}

} // namespace

UdpTransport::UdpTransport(const NetConfig& cfg, int num_agents)
    : cfg_(cfg), n_(num_agents), queues_(static_cast<std::size_t>(num_agents)), rng_(cfg.seed) {
    if (num_agents <= 0) throw std::invalid_argument("transport needs at least one agent");
    if (!cfg.ports.empty() && static_cast<int>(cfg.ports.size()) != num_agents) {
        throw std::invalid_argument("udp: one port per agent required");
    }
    stats_.per_pid.resize(static_cast<std::size_t>(num_agents));
    auto cleanup = [this] {
        for (int fd : fds_) ::close(fd);
        fds_.clear();
    };
    for (int pid = 0; pid < num_agents; ++pid) {
        int want = 0;
        if (!cfg.ports.empty()) {
            want = cfg.ports[static_cast<std::size_t>(pid)];
        } else if (cfg.base_port > 0) {
            want = cfg.base_port + pid;
        }
        int fd = ::socket(AF_INET, SOCK_DGRAM, 0);
        if (fd < 0) {
            cleanup();
            throw std::runtime_error(fmt::format("udp: socket(): {}", std::strerror(errno)));
        }
        int buf = 4 << 20;
        ::setsockopt(fd, SOL_SOCKET, SO_RCVBUF, &buf, sizeof buf);
        auto addr = loopback(want);
        if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
            int err = errno;
            ::close(fd);
            cleanup();
            throw std::runtime_error(fmt::format("udp: bind port {} for pid {}: {}", want, pid, std::strerror(err)));
        }
        socklen_t len = sizeof addr;
        ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
        fds_.push_back(fd);
        ports_.push_back(ntohs(addr.sin_port));
    }
    for (int pid = 0; pid < num_agents; ++pid) threads_.emplace_back([this, pid] { receive_loop(pid); });
}

UdpTransport::~UdpTransport() {
    stop_ = true;
    for (auto& t : threads_) t.join();
    for (int fd : fds_) ::close(fd);
}

int UdpTransport::pid_of_port(int port) const {
    auto it = std::find(ports_.begin(), ports_.end(), port);
    return it == ports_.end() ? -1 : static_cast<int>(it - ports_.begin());
}

void UdpTransport::receive_loop(int pid) {
    std::vector<std::uint8_t> buf(65536);
    int fd = fds_[static_cast<std::size_t>(pid)];
    while (!stop_) {
        pollfd pfd{fd, POLLIN, 0};
        int rc = ::poll(&pfd, 1, 20);
        if (rc <= 0) continue;
        sockaddr_in from{};
        socklen_t len = sizeof from;
        auto got = ::recvfrom(fd, buf.data(), buf.size(), 0, reinterpret_cast<sockaddr*>(&from), &len);
        std::lock_guard lock(mu_);
        auto& s = stats_.per_pid[static_cast<std::size_t>(pid)];
        if (got < 0) {
            ++s.errors;
            continue;
        }
        int sender = pid_of_port(ntohs(from.sin_port));
        if (sender < 0) {
            ++s.errors;
            continue;
        }
        queues_[static_cast<std::size_t>(pid)].push_back(
            Packet{sender, std::vector<std::uint8_t>(buf.begin(), buf.begin() + got), 0.0, seq_++});
        ++arrived_;
    }
}

int UdpTransport::broadcast(int sender, std::span<const std::uint8_t> payload, double) {
    if (sender < 0 || sender >= n_) throw std::out_of_range("sender pid out of range");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int sent = 0;
    std::lock_guard lock(mu_);
    auto& s = stats_.per_pid[static_cast<std::size_t>(sender)];
    ++s.packets_sent;
    s.bytes_sent += payload.size();
    for (int r = 0; r < n_; ++r) {
        if (r == sender) continue;
        if (cfg_.loss_prob > 0.0 && unit(rng_) < cfg_.loss_prob) {
            ++s.dropped;
            continue;
        }
        auto addr = loopback(ports_[static_cast<std::size_t>(r)]);
        auto rc = ::sendto(fds_[static_cast<std::size_t>(sender)], payload.data(), payload.size(), 0,
                           reinterpret_cast<sockaddr*>(&addr), sizeof addr);
        if (rc < 0) {
            ++s.errors;
            continue;
        }
        ++expected_;
        ++sent;
    }
    return sent;
}

void UdpTransport::settle(double max_wait) {
    auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(max_wait);
    while (std::chrono::steady_clock::now() < deadline) {
        {
            std::lock_guard lock(mu_);
            if (arrived_ >= expected_) return;
        }
        std::this_thread::sleep_for(std::chrono::microseconds(200));
    }
}

std::vector<Packet> UdpTransport::poll(int receiver, double now) {
    std::lock_guard lock(mu_);
    auto& q = queues_.at(static_cast<std::size_t>(receiver));
    std::vector<Packet> out = std::move(q);
    q.clear();
    std::stable_sort(out.begin(), out.end(), [](const Packet& a, const Packet& b) {
        return a.sender != b.sender ? a.sender < b.sender : a.seq < b.seq;
    });
    auto& s = stats_.per_pid[static_cast<std::size_t>(receiver)];
    for (auto& p : out) {
        p.deliver_at = now;
        ++s.packets_received;
        s.bytes_received += p.bytes.size();
        bump(stats_.bytes_per_round, round_, p.bytes.size());
    }
    bump(stats_.received_per_round, round_, out.size());
    return out;
}

PacketStats UdpTransport::stats() const {
    std::lock_guard lock(mu_);
    return stats_;
}

} // namespace koord::net
