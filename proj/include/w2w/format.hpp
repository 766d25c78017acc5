#pragma once

#include <charconv>
#include <string>
#include <string_view>

namespace w2w {

// Shortest decimal form that parses back to the identical double; keeps
// emitted files byte-stable across runs and locales.
inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// Full-string parse; returns false on trailing junk or malformed input.
inline bool parse_double(std::string_view s, double& out) {
    const char* end = s.data() + s.size();
    auto res = std::from_chars(s.data(), end, out);
    return res.ec == std::errc{} && res.ptr == end;
}

inline bool parse_i64(std::string_view s, long long& out) {
    const char* end = s.data() + s.size();
    auto res = std::from_chars(s.data(), end, out);
    return res.ec == std::errc{} && res.ptr == end;
}

} // namespace w2w
