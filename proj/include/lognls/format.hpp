#pragma once

#include <cstdio>
#include <string>

namespace lognls {

/// Shortest round-trippable decimal form (17 significant digits).
inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Fixed 6-significant-digit form for plot coordinates and summaries.
inline std::string fmt_g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace lognls
