#pragma once

#include <stdexcept>
#include <string>

namespace w2w {

// Error taxonomy mirrored by the CLI exit codes. Anything not covered by
// these three classes is a plain std::runtime_error (exit code 1).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int generic = 1;
inline constexpr int config = 2;
inline constexpr int data_format = 3;
inline constexpr int numeric = 4;
} // namespace exit_code

} // namespace w2w
