#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace brl {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // every row has header.size() cells

  std::size_t column_index(const std::string& name) const;  // npos if absent
};

// RFC 4180 reader: comma-delimited, double-quote quoting, quotes escaped by
// doubling, newlines allowed inside quoted fields. CRLF and LF both accepted.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

// Quotes a cell only when it contains a comma, quote, or newline.
std::string csv_escape(const std::string& cell);

}  // namespace brl
