#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace danneal {

// Shortest decimal form that parses back to the same double ("0.1", "1e-09",
// "44"). CSV and config output go through this so round-trips are exact.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_int(std::int64_t v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace danneal
