#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace eprsim {

/// Shortest-faithful decimal with 17 significant digits; re-parsing
/// recovers the double bit-exactly. Locale independent.
std::string format_double(double v);

double parse_double(const std::string& s);

/// Ordered key/value metadata embedded in every output so it can be
/// reproduced exactly: tool version, geometry hash, seed, rule, ...
struct Metadata {
    std::vector<std::pair<std::string, std::string>> items;

    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void add(const std::string& key, std::uint64_t value);

    /// `# key = value` lines.
    void write_csv_header(std::ostream& os) const;
};

}  // namespace eprsim
