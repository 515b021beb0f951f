#ifndef LWMY_FORMAT_HPP
#define LWMY_FORMAT_HPP

#include <charconv>
#include <string>

namespace lwmy {

/// Shortest round-trip decimal form of a double. Used everywhere a number
/// lands in a report, header, or key so that output is byte-reproducible.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace lwmy

#endif
