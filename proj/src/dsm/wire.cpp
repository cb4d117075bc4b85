#include "koord/dsm/wire.hpp"

#include <bit>
#include <cstring>

#include <fmt/format.h>

namespace koord::dsm {

namespace {

class Writer {
public:
    std::vector<std::uint8_t> out;

    void be16(std::uint16_t v) {
        out.push_back(static_cast<std::uint8_t>(v >> 8));
        out.push_back(static_cast<std::uint8_t>(v));
    }
    void be32(std::uint32_t v) {
        be16(static_cast<std::uint16_t>(v >> 16));
        be16(static_cast<std::uint16_t>(v));
    }
    void le(std::uint64_t v, int bytes) {
        for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double d) { le(std::bit_cast<std::uint64_t>(d), 8); }
    void point(const Vec3& p) {
        f64(p.x);
        f64(p.y);
        f64(p.z);
    }
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}

    void need(std::size_t n) const {
        if (pos_ + n > b_.size()) throw WireError(fmt::format("truncated datagram ({} bytes)", b_.size()));
    }
    std::uint16_t be16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>((b_[pos_] << 8) | b_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    std::uint32_t be32() {
        std::uint32_t hi = be16();
        return (hi << 16) | be16();
    }
    std::uint8_t u8() {
        need(1);
        return b_[pos_++];
    }
    std::uint64_t le(int bytes) {
        need(static_cast<std::size_t>(bytes));
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(b_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
        pos_ += static_cast<std::size_t>(bytes);
        return v;
    }
    double f64() { return std::bit_cast<double>(le(8)); }
    Vec3 point() {
        Vec3 p;
        p.x = f64();
        p.y = f64();
        p.z = f64();
        return p;
    }
    std::size_t remaining() const { return b_.size() - pos_; }

private:
    std::span<const std::uint8_t> b_;
    std::size_t pos_ = 0;
};

void write_payload(Writer& w, const Value& v) {
    std::visit(
        [&](const auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::int64_t>) {
                w.le(static_cast<std::uint64_t>(x), 8);
            } else if constexpr (std::is_same_v<T, double>) {
                w.f64(x);
            } else if constexpr (std::is_same_v<T, bool>) {
                w.le(x ? 1 : 0, 1);
            } else if constexpr (std::is_same_v<T, Vec3>) {
                w.point(x);
            } else {
                if (x.size() > 0xFFFF) throw WireError("list too long for one datagram");
                w.le(x.size(), 2);
                for (const auto& e : x) {
                    w.point(e.p);
                    w.le(static_cast<std::uint32_t>(e.claim), 4);
                }
            }
        },
        v);
}

Value read_payload(Reader& r, ValueType t) {
    switch (t) {
        case ValueType::Int: return static_cast<std::int64_t>(r.le(8));
        case ValueType::Float: return r.f64();
        case ValueType::Bool: return r.u8() != 0;
        case ValueType::Pos: return r.point();
        case ValueType::PosList: {
            auto n = r.le(2);
            PosList out;
            out.reserve(n);
            for (std::uint64_t i = 0; i < n; ++i) {
                Vec3 p = r.point();
                auto claim = static_cast<std::int32_t>(static_cast<std::uint32_t>(r.le(4)));
                out.push_back({p, claim});
            }
            return out;
        }
    }
    throw WireError("unknown value type");
}

} // namespace

std::vector<std::uint8_t> encode(const UpdateMsg& msg) {
    Writer payload;
    if (msg.kind == MsgKind::Write) write_payload(payload, msg.value);
    if (payload.out.size() > 0xFFFF) throw WireError("payload too large");

    Writer w;
    w.out.reserve(kHeaderSize + payload.out.size());
    w.be16(kMagic);
    w.out.push_back(kVersion);
    w.out.push_back(static_cast<std::uint8_t>(msg.kind));
    w.be16(static_cast<std::uint16_t>(msg.sender));
    w.be32(msg.round);
    w.be16(static_cast<std::uint16_t>(msg.var_id));
    w.be16(msg.index < 0 ? kScalarIndex : static_cast<std::uint16_t>(msg.index));
    w.be16(static_cast<std::uint16_t>(payload.out.size()));
    w.out.insert(w.out.end(), payload.out.begin(), payload.out.end());
    return std::move(w.out);
}

UpdateMsg decode(std::span<const std::uint8_t> bytes, const std::function<ValueType(int)>& type_of_var) {
    Reader r(bytes);
    if (r.be16() != kMagic) throw WireError("bad magic");
    if (r.u8() != kVersion) throw WireError("unsupported version");
    auto kind = r.u8();
    if (kind > 2) throw WireError(fmt::format("unknown message kind {}", kind));
    UpdateMsg m;
    m.kind = static_cast<MsgKind>(kind);
    m.sender = r.be16();
    m.round = r.be32();
    m.var_id = r.be16();
    auto index = r.be16();
    m.index = index == kScalarIndex ? -1 : index;
    auto len = r.be16();
    if (r.remaining() != len) throw WireError(fmt::format("payload length {} but {} bytes follow", len, r.remaining()));
    if (m.kind == MsgKind::Write) {
        m.value = read_payload(r, type_of_var(m.var_id));
        if (r.remaining() != 0) throw WireError("payload longer than its type");
    }
    return m;
}

} // namespace koord::dsm
