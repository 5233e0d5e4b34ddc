#include "degan/types.hpp"

#include <cstdio>
#include <stdexcept>

namespace degan {

std::string format_scalar(Scalar v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Scalar parse_scalar(const std::string& text) {
    size_t pos = 0;
    Scalar v;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("invalid number: '" + text + "'");
    }
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\r')) ++pos;
    if (pos != text.size())
        throw std::runtime_error("trailing characters in number: '" + text + "'");
    return v;
}

} // namespace degan
