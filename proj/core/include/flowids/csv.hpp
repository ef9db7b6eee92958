#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace flowids::csv {

using Row = std::vector<std::string>;

// Reads one RFC 4180 record (quoted fields may span lines). Returns false at
// end of input. A trailing '\r' before the newline is dropped.
bool read_row(std::istream& in, Row& row);

// Quotes the field only when it contains a comma, quote or newline.
std::string escape(std::string_view field);
// Always double-quotes the field.
std::string quote(std::string_view field);

void write_row(std::ostream& out, const Row& row);

std::string trim(std::string_view s);

}  // namespace flowids::csv
