#pragma once

#include <cstdio>
#include <string>

namespace volteface {

/// 17 significant digits: lossless round-trip for IEEE doubles in CSV output.
inline std::string format_double_17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace volteface
