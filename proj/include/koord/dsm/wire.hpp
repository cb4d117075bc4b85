#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "koord/value.hpp"

namespace koord::dsm {

enum class MsgKind : std::uint8_t { Write = 0, AtomicIntent = 1, AtomicGrant = 2 };

inline constexpr std::uint16_t kMagic = 0x4B52;
inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::uint16_t kScalarIndex = 0xFFFF;
inline constexpr std::size_t kHeaderSize = 16;

struct UpdateMsg {
    MsgKind kind = MsgKind::Write;
    int sender = 0;
    std::uint32_t round = 0;
    int var_id = 0;  // for intents/grants: the arbitration scope
    int index = -1;  // -1: scalar (0xFFFF on the wire)
    Value value;     // unused for intents/grants

    friend bool operator==(const UpdateMsg&, const UpdateMsg&) = default;
};

class WireError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode(const UpdateMsg& msg);

/// `type_of_var` maps a var_id to its declared type; only consulted for
/// write messages. Throws WireError on a malformed datagram.
UpdateMsg decode(std::span<const std::uint8_t> bytes, const std::function<ValueType(int)>& type_of_var);

} // namespace koord::dsm
