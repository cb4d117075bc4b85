#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace koord::sim {

/// Error in a configuration file; `where` is a key path such as
/// `robot[2].start` or a `line N` location.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string where, const std::string& msg)
        : std::runtime_error(where.empty() ? msg : where + ": " + msg), where_(std::move(where)) {}
    const std::string& where() const { return where_; }

private:
    std::string where_;
};

/// One `key: value` entry and whatever is nested under it. Sequence entries
/// become `items`. Keys may repeat.
struct ConfigNode {
    std::string key;
    std::string value;
    int line = 0;
    std::vector<ConfigNode> children;
    std::vector<std::string> items;
    std::vector<int> item_lines;

    std::vector<const ConfigNode*> all(const std::string& k) const;
    const ConfigNode* find(const std::string& k) const;
};

/// Parses YAML text into a key tree. The returned root has an empty key.
/// Throws ConfigError on syntax errors.
ConfigNode parse_config_text(const std::string& text);

} // namespace koord::sim
