#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace annblock::csv {

/// One parsed CSV table: header row plus data rows, all fields as strings.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a header column, or -1 when absent.
    int column(const std::string& name) const;
};

/// RFC-4180-style parser: quoted fields, embedded commas and newlines,
/// doubled quotes, CRLF or LF line endings. First row is the header.
Table read_file(const std::string& path);
Table parse(const std::string& text, const std::string& origin = "<string>");

/// Quotes a field only when needed (comma, quote, or newline present).
std::string escape_field(const std::string& field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace annblock::csv
