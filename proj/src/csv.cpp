#include "brl/csv.hpp"

#include <fstream>
#include <sstream>

#include "brl/errors.hpp"

namespace brl {

std::size_t CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  return static_cast<std::size_t>(-1);
}

namespace {

// Parses one record starting at the current stream position. Returns false on
// end of input with no cells consumed.
bool read_record(std::istream& in, std::vector<std::string>& out) {
  out.clear();
  std::string cell;
  bool in_quotes = false;
  bool any = false;
  int ch;
  while ((ch = in.get()) != EOF) {
    any = true;
    char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          cell.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        cell.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      out.push_back(std::move(cell));
      cell.clear();
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get();
      out.push_back(std::move(cell));
      return true;
    } else if (c == '\n') {
      out.push_back(std::move(cell));
      return true;
    } else {
      cell.push_back(c);
    }
  }
  if (in_quotes) throw DataError("csv: unterminated quoted field");
  if (!any) return false;
  out.push_back(std::move(cell));
  return true;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  if (!read_record(in, table.header) || table.header.empty())
    throw DataError("csv: missing header row");
  std::vector<std::string> record;
  while (read_record(in, record)) {
    if (record.size() == 1 && record[0].empty()) continue;  // blank line
    if (record.size() != table.header.size()) {
      std::ostringstream msg;
      msg << "csv: row " << table.rows.size() + 1 << " has " << record.size()
          << " cells, expected " << table.header.size();
      throw DataError(msg.str());
    }
    table.rows.push_back(record);
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  return read_csv(in);
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace brl
