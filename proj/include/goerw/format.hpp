#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <system_error>

#include "goerw/error.hpp"

namespace goerw {

/// Shortest round-trip decimal form; locale independent, so text outputs are
/// byte-identical across runs and platforms.
inline std::string format_double(double x) {
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

inline double parse_double(std::string_view s, std::string_view what) {
    double x = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (!s.empty() && *first == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc{} || ptr != last || s.empty())
        fail(ErrorKind::Parse, "cannot parse '" + std::string(s) + "' as a number for " + std::string(what));
    return x;
}

template <typename Int>
Int parse_int(std::string_view s, std::string_view what) {
    Int x{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        fail(ErrorKind::Parse, "cannot parse '" + std::string(s) + "' as an integer for " + std::string(what));
    return x;
}

}  // namespace goerw
