#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace wtn::csv {

// Splits one CSV line into fields. Double-quoted fields may contain commas
// and "" escapes. A trailing '\r' is ignored.
std::vector<std::string> split_line(std::string_view line);

// Quotes a field only when it contains a comma, quote or newline.
std::string escape(std::string_view field);

// Reads the next non-empty line; returns false at EOF.
bool next_line(std::istream& in, std::string& line);

} // namespace wtn::csv
