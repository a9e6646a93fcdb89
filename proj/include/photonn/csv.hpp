#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <type_traits>

namespace photonn::csv {

/// Shortest round-trippable text for a double (17 significant digits).
inline std::string num(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

template <typename... Ts>
void row(std::ostream& os, const Ts&... fields) {
    bool first = true;
    auto put = [&](const auto& f) {
        if (!first) os << ',';
        first = false;
        if constexpr (std::is_floating_point_v<std::decay_t<decltype(f)>>)
            os << num(f);
        else
            os << f;
    };
    (put(fields), ...);
    os << '\n';
}

}  // namespace photonn::csv
