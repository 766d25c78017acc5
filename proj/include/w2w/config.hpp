#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace w2w {

// Flat dotted-key configuration. File syntax: one "key = value" per
// line, '#' starts a comment, blank lines ignored. Values keep internal
// spaces (arch strings). Lookups with a fallback return it when the key
// is absent; malformed numbers raise ConfigError naming the key.
class Config {
public:
    static Config from_file(const std::string& path); // DataError when unreadable
    static Config from_text(const std::string& text, const std::string& origin = "<text>");

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string require(const std::string& key) const; // ConfigError naming the key
    std::string get(const std::string& key, const std::string& fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;

    // ConfigError on any key outside `known`; catches typos early.
    void check_known(const std::vector<std::string>& known) const;

    // "key = value" lines in sorted key order; parses back identically.
    std::string serialize() const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace w2w
