#include "koord/value.hpp"

#include <fmt/format.h>

namespace koord {

std::string to_string(ValueType t) {
    switch (t) {
        case ValueType::Int: return "int";
        case ValueType::Float: return "float";
        case ValueType::Bool: return "bool";
        case ValueType::Pos: return "pos";
        case ValueType::PosList: return "list<pos>";
    }
    return "?";
}

ValueType type_of(const Value& v) {
    return static_cast<ValueType>(v.index());
}

Value default_value(ValueType t) {
    switch (t) {
        case ValueType::Int: return std::int64_t{0};
        case ValueType::Float: return 0.0;
        case ValueType::Bool: return false;
        case ValueType::Pos: return Vec3{};
        case ValueType::PosList: return PosList{};
    }
    return std::int64_t{0};
}

namespace {

std::string format_pos(const Vec3& p) {
    return fmt::format("({:.4f},{:.4f},{:.4f})", p.x, p.y, p.z);
}

struct Formatter {
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return fmt::format("{:.6f}", d); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const Vec3& p) const { return format_pos(p); }
    std::string operator()(const PosList& l) const {
        std::string out = "[";
        for (std::size_t i = 0; i < l.size(); ++i) {
            if (i) out += ' ';
            out += format_pos(l[i].p);
            if (l[i].claim >= 0) out += fmt::format("@{}", l[i].claim);
        }
        return out + "]";
    }
};

} // namespace

std::string format_value(const Value& v) {
    return std::visit(Formatter{}, v);
}

PosList to_pos_list(const std::vector<Vec3>& points) {
    PosList out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back({p, -1});
    return out;
}

std::vector<Vec3> points_of(const PosList& list) {
    std::vector<Vec3> out;
    out.reserve(list.size());
    for (const auto& e : list) out.push_back(e.p);
    return out;
}

} // namespace koord
