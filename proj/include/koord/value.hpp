#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "koord/vec3.hpp"

namespace koord {

enum class ValueType { Int, Float, Bool, Pos, PosList };

std::string to_string(ValueType t);

/// One entry of a `list<pos>`: a point plus the pid that claimed it (-1 when
/// unclaimed). Paths ignore the claim; task lists use it for `assign`.
struct TaggedPoint {
    Vec3 p;
    int claim = -1;

    friend bool operator==(const TaggedPoint&, const TaggedPoint&) = default;
};

using PosList = std::vector<TaggedPoint>;

using Value = std::variant<std::int64_t, double, bool, Vec3, PosList>;

ValueType type_of(const Value& v);
Value default_value(ValueType t);

/// Canonical text used in traces and diagnostics.
std::string format_value(const Value& v);

PosList to_pos_list(const std::vector<Vec3>& points);
std::vector<Vec3> points_of(const PosList& list);

} // namespace koord
