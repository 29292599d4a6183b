#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace surfacc {

// Flat "key = value" settings. Lines starting with '#' and blank lines are ignored; a '#' after a
// value starts a comment.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(std::string_view text, const std::string& origin = "config");
    static KeyValueConfig load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    // Applies `other` on top of this config; every key in `other` must already exist here.
    void override_with(const KeyValueConfig& other);
    // Parses "key=value" and applies it like override_with.
    void override_with(const std::string& assignment);

    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    long get_int(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;  // comma-separated

    const std::map<std::string, std::string>& values() const { return values_; }
    // Every key under "prefix." with the prefix stripped.
    std::map<std::string, std::string> section(const std::string& prefix) const;
    void write(std::ostream& out, const std::string& line_prefix = "") const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace surfacc
