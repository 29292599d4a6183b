#include "surfacc/config.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "surfacc/errors.hpp"

namespace surfacc {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::pair<std::string, std::string> split_assignment(std::string_view line, const std::string& where) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    return {std::move(key), std::move(value)};
}

double to_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("setting '" + key + "': not a number: '" + text + "'");
    return v;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text, const std::string& origin) {
    KeyValueConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        if (trim(line).empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        auto [key, value] = split_assignment(line, where);
        if (cfg.has(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
        cfg.values_.emplace(std::move(key), std::move(value));
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

void KeyValueConfig::override_with(const KeyValueConfig& other) {
    for (const auto& [k, v] : other.values_) {
        if (!has(k)) throw ConfigError("unknown setting '" + k + "'");
        values_[k] = v;
    }
}

void KeyValueConfig::override_with(const std::string& assignment) {
    auto [key, value] = split_assignment(assignment, "override '" + assignment + "'");
    KeyValueConfig one;
    one.values_.emplace(std::move(key), std::move(value));
    override_with(one);
}

const std::string& KeyValueConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing setting '" + key + "'");
    return it->second;
}

double KeyValueConfig::get_double(const std::string& key) const { return to_double(key, get(key)); }

long KeyValueConfig::get_int(const std::string& key) const {
    const std::string& text = get(key);
    long v = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError("setting '" + key + "': not an integer: '" + text + "'");
    return v;
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const {
    std::vector<double> out;
    std::istringstream in(get(key));
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    return out;
}

std::map<std::string, std::string> KeyValueConfig::section(const std::string& prefix) const {
    std::map<std::string, std::string> out;
    const std::string p = prefix + ".";
    for (const auto& [k, v] : values_)
        if (k.compare(0, p.size(), p) == 0) out.emplace(k.substr(p.size()), v);
    return out;
}

void KeyValueConfig::write(std::ostream& out, const std::string& line_prefix) const {
    for (const auto& [k, v] : values_) out << line_prefix << k << " = " << v << "\n";
}

}  // namespace surfacc
