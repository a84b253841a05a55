#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "relatron/io.hpp"

namespace relatron {

enum class ColumnKind { Numeric, Categorical, Text };

enum class TimeFormat { Iso8601, EpochSeconds };

struct ForeignKeySpec {
  std::string column;
  std::string references_table;
};

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::Categorical;
};

struct TableSpec {
  std::string name;
  std::string file;
  std::string primary_key;
  std::optional<std::string> time_column;
  TimeFormat time_format = TimeFormat::Iso8601;
  std::vector<ForeignKeySpec> foreign_keys;
  std::vector<ColumnSpec> columns;

  int column_index(const std::string& column) const;  // -1 when absent
};

struct Schema {
  std::vector<TableSpec> tables;

  int table_index(const std::string& table) const;  // -1 when absent
};

Schema schema_from_json(const json& doc);
Schema load_schema(const std::string& path);

// Column stores. Missing cells are tracked with a null mask; numeric cells
// that fail to parse are nulled and counted as warnings rather than dropped.
struct NumericColumn {
  std::vector<double> values;
  std::vector<std::uint8_t> is_null;
  long long parse_warnings = 0;
};

struct StringColumn {
  std::vector<std::string> values;
  std::vector<std::uint8_t> is_null;
};

struct TableData {
  std::size_t row_count = 0;
  std::vector<std::string> pk_values;
  std::unordered_map<std::string, int> pk_to_row;

  // Parallel to TableSpec::columns; exactly one of the two stores is active
  // per column (numeric vs categorical/text).
  std::vector<NumericColumn> numeric;
  std::vector<StringColumn> strings;

  // Parallel to TableSpec::foreign_keys: referenced row index or -1.
  std::vector<std::vector<int>> fk_rows;
  std::vector<long long> fk_null_count;
  std::vector<long long> fk_dangling_count;

  // Epoch seconds for the declared time column (0 + null mask when absent).
  std::vector<std::int64_t> timestamps;
  std::vector<std::uint8_t> timestamp_null;
  bool has_time = false;
};

struct Database {
  Schema schema;
  std::vector<TableData> tables;

  const TableData& table(const std::string& name) const;
  const TableSpec& spec(const std::string& name) const;
};

Database load_database(const Schema& schema, const std::string& dir);

// ISO-8601 date or date-time ("YYYY-MM-DD", "YYYY-MM-DD HH:MM:SS",
// "YYYY-MM-DDTHH:MM:SSZ") to epoch seconds; integer strings under
// TimeFormat::EpochSeconds.
std::int64_t parse_timestamp(const std::string& text, TimeFormat format);

}  // namespace relatron
