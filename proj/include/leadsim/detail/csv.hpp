#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "leadsim/types.hpp"

namespace leadsim::detail {

/// Locale-independent fixed-point float formatting (CSV cells).
inline void append_fixed(std::string& out, Scalar value, int precision = 6) {
    char buf[64];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, precision);
    if (res.ec != std::errc()) throw std::runtime_error("number formatting failed");
    out.append(buf, res.ptr);
}

inline void append_int(std::string& out, std::int64_t value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    out.append(buf, res.ptr);
}

inline std::string fixed_string(Scalar value, int precision = 6) {
    std::string s;
    append_fixed(s, value, precision);
    return s;
}

}  // namespace leadsim::detail
