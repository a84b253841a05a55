#include "relatron/csv.hpp"

#include <fstream>
#include <sstream>

#include "relatron/error.hpp"

namespace relatron {

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable out;
  std::vector<std::string> record;
  std::string cell;
  bool in_quotes = false;
  bool cell_started = false;
  bool record_started = false;

  auto end_cell = [&]() {
    record.push_back(cell);
    cell.clear();
    cell_started = false;
  };
  auto end_record = [&]() {
    end_cell();
    if (out.header.empty()) {
      out.header = record;
    } else {
      out.rows.push_back(record);
    }
    record.clear();
    record_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cell.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        cell_started = true;
        record_started = true;
        break;
      case ',':
        end_cell();
        record_started = true;
        break;
      case '\r':
        break;  // handled by the following '\n'
      case '\n':
        if (record_started || cell_started || !record.empty()) {
          end_record();
        }
        break;
      default:
        cell.push_back(c);
        cell_started = true;
        record_started = true;
        break;
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::ParseError, "unterminated quoted CSV field");
  }
  if (record_started || cell_started || !record.empty()) {
    end_record();
  }

  for (std::size_t r = 0; r < out.rows.size(); ++r) {
    if (out.rows[r].size() != out.header.size()) {
      throw Error(ErrorCode::ParseError,
                  "CSV row " + std::to_string(r + 2) + " has " +
                      std::to_string(out.rows[r].size()) + " cells, header has " +
                      std::to_string(out.header.size()));
    }
  }
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::MissingFile, path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string csv_escape(const std::string& cell) {
  bool need = false;
  for (char c : cell) {
    if (c == ',' || c == '"' || c == '\n' || c == '\r') {
      need = true;
      break;
    }
  }
  if (!need) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace relatron
