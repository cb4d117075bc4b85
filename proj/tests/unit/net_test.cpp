#include <gtest/gtest.h>

#include "koord/net/in_process.hpp"
#include "koord/net/udp.hpp"

using namespace koord::net;

namespace {

std::vector<std::uint8_t> bytes(std::uint8_t tag) {
    return {tag, 1, 2, 3};
}

} // namespace

TEST(InProcess, LosslessFanout) {
    InProcessTransport t({}, 4);
    EXPECT_EQ(t.broadcast(0, bytes(1), 0.0), 3);
    EXPECT_TRUE(t.poll(0, 0.0).empty());
    for (int r = 1; r < 4; ++r) EXPECT_EQ(t.poll(r, 0.0).size(), 1u);
    EXPECT_EQ(t.stats().total_received(), 3u);
}

TEST(InProcess, TotalLoss) {
    NetConfig c;
    c.loss_prob = 1.0;
    InProcessTransport t(c, 4);
    EXPECT_EQ(t.broadcast(2, bytes(1), 0.0), 0);
    EXPECT_EQ(t.stats().per_pid[2].dropped, 3u);
    for (int r = 0; r < 4; ++r) EXPECT_TRUE(t.poll(r, 10.0).empty());
}

TEST(InProcess, SeededLossIsReproducible) {
    auto run = [] {
        NetConfig c;
        c.loss_prob = 0.5;
        c.seed = 1234;
        InProcessTransport t(c, 2);
        std::vector<int> log;
        for (int i = 0; i < 1000; ++i) {
            t.broadcast(i % 2, bytes(static_cast<std::uint8_t>(i)), i);
            for (int r = 0; r < 2; ++r) {
                for (const auto& p : t.poll(r, i)) log.push_back(i * 2 + r + p.bytes[0]);
            }
        }
        return log;
    };
    auto a = run();
    auto b = run();
    EXPECT_EQ(a, b);
    EXPECT_GT(a.size(), 350u);
    EXPECT_LT(a.size(), 650u);
}

TEST(InProcess, DelayContract) {
    NetConfig c;
    c.delay_min = c.delay_max = 0.25;
    InProcessTransport t(c, 2);
    t.broadcast(0, bytes(1), 1.0);
    EXPECT_TRUE(t.poll(1, 1.2).empty());
    EXPECT_EQ(t.poll(1, 1.25).size(), 1u);
}

TEST(InProcess, TieBreakBySender) {
    InProcessTransport t({}, 4);
    t.broadcast(3, bytes(3), 0.0);
    t.broadcast(1, bytes(1), 0.0);
    auto got = t.poll(0, 0.0);
    ASSERT_EQ(got.size(), 2u);
    EXPECT_EQ(got[0].sender, 1);
    EXPECT_EQ(got[1].sender, 3);
}

TEST(InProcess, FifoPerPairUnderFixedDelay) {
    NetConfig c;
    c.delay_min = c.delay_max = 0.05;
    InProcessTransport t(c, 2);
    for (int i = 0; i < 10; ++i) t.broadcast(0, bytes(static_cast<std::uint8_t>(i)), 0.0);
    auto got = t.poll(1, 1.0);
    ASSERT_EQ(got.size(), 10u);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(got[static_cast<std::size_t>(i)].bytes[0], i);
}

TEST(InProcess, PerRoundHistogram) {
    InProcessTransport t({}, 3);
    t.set_round(0);
    t.broadcast(0, bytes(1), 0.0);
    for (int r = 0; r < 3; ++r) t.poll(r, 0.0);
    t.set_round(1);
    t.broadcast(0, bytes(1), 0.1);
    t.broadcast(1, bytes(1), 0.1);
    for (int r = 0; r < 3; ++r) t.poll(r, 0.1);
    auto st = t.stats();
    ASSERT_EQ(st.received_per_round.size(), 2u);
    EXPECT_EQ(st.received_per_round[0], 2u);
    EXPECT_EQ(st.received_per_round[1], 4u);
}

TEST(Udp, LoopbackFanout) {
    UdpTransport t({NetMode::Udp}, 3);
    EXPECT_EQ(t.broadcast(1, bytes(9), 0.0), 2);
    t.settle(2.0);
    EXPECT_TRUE(t.poll(1, 0.0).empty());
    for (int r : {0, 2}) {
        auto got = t.poll(r, 0.0);
        ASSERT_EQ(got.size(), 1u);
        EXPECT_EQ(got[0].sender, 1);
        EXPECT_EQ(got[0].bytes, bytes(9));
    }
    EXPECT_EQ(t.stats().total_received(), 2u);
    EXPECT_EQ(t.stats().total_errors(), 0u);
}
