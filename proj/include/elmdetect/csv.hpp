#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace elmdetect::csv {

using Row = std::vector<std::string>;

// RFC-4180 reader: comma separated, double-quote quoting with "" escapes,
// quoted fields may span lines, CRLF or LF record ends. A UTF-8 byte order
// mark on the first field is dropped.
struct Table {
  Row header;
  std::vector<Row> rows;
  // 1-based physical line on which each row starts, for error messages.
  std::vector<std::size_t> row_lines;
};

// Throws Error(kMalformedRow) on an unclosed quote or a row whose column
// count differs from the header.
Table parse(std::string_view text);

std::string escape_field(std::string_view field);
std::string join_row(const std::vector<std::string>& fields);

}  // namespace elmdetect::csv
