#include "eprsim/output.hpp"

#include <array>
#include <charconv>
#include <ostream>
#include <stdexcept>

namespace eprsim {

std::string format_double(double v) {
    std::array<char, 64> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{})
        throw std::invalid_argument("parse_double: bad value '" + s + "'");
    for (const char* p = res.ptr; p != last; ++p)
        if (*p != ' ' && *p != '\t' && *p != '\r')
            throw std::invalid_argument("parse_double: trailing junk in '" + s + "'");
    return v;
}

void Metadata::add(const std::string& key, const std::string& value) {
    items.emplace_back(key, value);
}

void Metadata::add(const std::string& key, double value) {
    items.emplace_back(key, format_double(value));
}

void Metadata::add(const std::string& key, std::uint64_t value) {
    items.emplace_back(key, std::to_string(value));
}

void Metadata::write_csv_header(std::ostream& os) const {
    for (const auto& [k, v] : items) os << "# " << k << " = " << v << "\n";
}

}  // namespace eprsim
