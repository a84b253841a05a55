#pragma once

#include <string>
#include <vector>

namespace relatron {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;  // each row has header.size() cells

  int column(const std::string& name) const;  // -1 when absent
};

// RFC-4180 reader: quoted fields, doubled-quote escapes, embedded newlines,
// CRLF line ends. The first record is the header.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

// Minimal writer counterpart; quotes only when needed.
std::string csv_escape(const std::string& cell);

}  // namespace relatron
