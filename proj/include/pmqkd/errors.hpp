#pragma once

#include <stdexcept>
#include <string>

namespace pmqkd {

// Invalid user-supplied configuration (bad key, bad value, bad range).
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Channel or model state with no usable signal (zero gain, dead protocol).
// The CLI maps this to exit code 3.
class DegenerateChannelError : public std::runtime_error {
public:
    explicit DegenerateChannelError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pmqkd
