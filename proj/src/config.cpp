#include "w2w/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "w2w/errors.hpp"
#include "w2w/format.hpp"

namespace w2w {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return from_text(ss.str(), path);
}

Config Config::from_text(const std::string& text, const std::string& origin) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config " + origin + ":" + std::to_string(line_no) + ": expected 'key = value', got '" +
                              line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config " + origin + ":" + std::to_string(line_no) + ": empty key");
        if (cfg.values_.count(key))
            throw ConfigError("config " + origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
        cfg.values_[key] = value;
    }
    return cfg;
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

bool Config::has(const std::string& key) const { return values_.count(key) != 0; }

std::string Config::require(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required config key '" + key + "'");
    return it->second;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

long long Config::get_int(const std::string& key, long long fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    long long v = 0;
    if (!parse_i64(it->second, v))
        throw ConfigError("config key '" + key + "': expected an integer, got '" + it->second + "'");
    return v;
}

double Config::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double v = 0.0;
    if (!parse_double(it->second, v))
        throw ConfigError("config key '" + key + "': expected a number, got '" + it->second + "'");
    return v;
}

std::uint64_t Config::get_seed(const std::string& key, std::uint64_t fallback) const {
    long long v = get_int(key, static_cast<long long>(fallback));
    if (v < 0) throw ConfigError("config key '" + key + "': seed must be non-negative");
    return static_cast<std::uint64_t>(v);
}

void Config::check_known(const std::vector<std::string>& known) const {
    for (const auto& [key, value] : values_) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown config key '" + key + "'");
    }
}

std::string Config::serialize() const {
    std::ostringstream out;
    for (const auto& [key, value] : values_) out << key << " = " << value << "\n";
    return out.str();
}

} // namespace w2w
