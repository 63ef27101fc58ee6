#pragma once

#include <array>
#include <charconv>
#include <string>

namespace geoconvex {

/// Shortest round-trip decimal form of a double ('.' separator).
inline std::string format_double(double v) {
    std::array<char, 40> buf;
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

}  // namespace geoconvex
