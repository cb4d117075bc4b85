#include "koord/sim/config_text.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace koord::sim {

std::vector<const ConfigNode*> ConfigNode::all(const std::string& k) const {
    std::vector<const ConfigNode*> out;
    for (const auto& c : children) {
        if (c.key == k) out.push_back(&c);
    }
    return out;
}

const ConfigNode* ConfigNode::find(const std::string& k) const {
    for (const auto& c : children) {
        if (c.key == k) return &c;
    }
    return nullptr;
}

namespace {

void fill(ConfigNode& out, const YAML::Node& n) {
    switch (n.Type()) {
        case YAML::NodeType::Null:
        case YAML::NodeType::Undefined: break;
        case YAML::NodeType::Scalar: out.value = n.Scalar(); break;
        case YAML::NodeType::Sequence:
            for (const auto& item : n) {
                if (!item.IsScalar()) {
                    throw ConfigError(fmt::format("line {}", item.Mark().line + 1), "list entries must be plain values");
                }
                out.items.push_back(item.Scalar());
                out.item_lines.push_back(item.Mark().line + 1);
            }
            break;
        case YAML::NodeType::Map:
            // yaml-cpp keeps repeated keys, which `robot:` / `device:` rely on
            for (auto it = n.begin(); it != n.end(); ++it) {
                if (!it->first.IsScalar()) throw ConfigError(fmt::format("line {}", it->first.Mark().line + 1), "keys must be plain");
                ConfigNode child;
                child.key = it->first.Scalar();
                child.line = it->first.Mark().line + 1;
                fill(child, it->second);
                out.children.push_back(std::move(child));
            }
            break;
    }
}

} // namespace

ConfigNode parse_config_text(const std::string& text) {
    YAML::Node doc;
    try {
        doc = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(fmt::format("line {}", e.mark.line + 1), e.msg);
    }
    ConfigNode root;
    if (!doc.IsNull() && !doc.IsMap()) throw ConfigError("", "top level must be a mapping");
    fill(root, doc);
    return root;
}

} // namespace koord::sim
