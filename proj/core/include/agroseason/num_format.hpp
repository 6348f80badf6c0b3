#ifndef AGROSEASON_NUM_FORMAT_HPP
#define AGROSEASON_NUM_FORMAT_HPP

#include <charconv>
#include <string>

namespace agroseason {

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

} // namespace agroseason

#endif
