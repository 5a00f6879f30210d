#pragma once
#include <charconv>
#include <cmath>
#include <string>

namespace cascade {

// Deterministic round-trip-exact float formatting for CSV output.  to_chars
// without a precision yields the shortest representation that parses back to
// the same bits; NaN/inf spellings are normalized so the files do not depend
// on libc quirks.
inline std::string fmt_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

}  // namespace cascade
