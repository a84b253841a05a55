#include "relatron/rdb.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "relatron/csv.hpp"
#include "relatron/error.hpp"

namespace relatron {

namespace {

ColumnKind parse_kind(const std::string& kind) {
  if (kind == "numeric") return ColumnKind::Numeric;
  if (kind == "categorical") return ColumnKind::Categorical;
  if (kind == "text") return ColumnKind::Text;
  throw Error(ErrorCode::UnknownColumnKind, kind);
}

TimeFormat parse_time_format(const std::string& fmt) {
  if (fmt == "iso8601") return TimeFormat::Iso8601;
  if (fmt == "epoch") return TimeFormat::EpochSeconds;
  throw Error(ErrorCode::ParseError, "unknown time_format: " + fmt);
}

bool parse_double(const std::string& text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(end[-1]))) --end;
  if (begin == end) return false;
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

}  // namespace

int TableSpec::column_index(const std::string& column) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == column) return static_cast<int>(i);
  }
  return -1;
}

int Schema::table_index(const std::string& table) const {
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (tables[i].name == table) return static_cast<int>(i);
  }
  return -1;
}

std::int64_t parse_timestamp(const std::string& text, TimeFormat format) {
  if (format == TimeFormat::EpochSeconds) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw Error(ErrorCode::BadTimestamp, "not an epoch integer: " + text);
    }
    return v;
  }
  int y = 0;
  unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char sep = '\0';
  int n = std::sscanf(text.c_str(), "%d-%u-%u%c%u:%u:%u", &y, &mo, &d, &sep, &h, &mi, &s);
  if (n != 3 && n != 7) {
    throw Error(ErrorCode::BadTimestamp, "not ISO-8601: " + text);
  }
  if (n == 7 && sep != 'T' && sep != ' ') {
    throw Error(ErrorCode::BadTimestamp, "bad date/time separator: " + text);
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60) {
    throw Error(ErrorCode::BadTimestamp, "out-of-range field: " + text);
  }
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

Schema schema_from_json(const json& doc) {
  Schema schema;
  if (!doc.contains("tables") || !doc["tables"].is_array()) {
    throw Error(ErrorCode::ParseError, "schema needs a tables array");
  }
  for (const auto& t : doc["tables"]) {
    TableSpec spec;
    spec.name = t.at("name").get<std::string>();
    spec.file = t.at("file").get<std::string>();
    spec.primary_key = t.at("primary_key").get<std::string>();
    if (t.contains("time_column") && !t["time_column"].is_null()) {
      spec.time_column = t["time_column"].get<std::string>();
    }
    if (t.contains("time_format")) {
      spec.time_format = parse_time_format(t["time_format"].get<std::string>());
    }
    if (t.contains("foreign_keys")) {
      for (const auto& fk : t["foreign_keys"]) {
        spec.foreign_keys.push_back({fk.at("column").get<std::string>(),
                                     fk.at("references_table").get<std::string>()});
      }
    }
    for (const auto& c : t.at("columns")) {
      spec.columns.push_back(
          {c.at("name").get<std::string>(), parse_kind(c.at("kind").get<std::string>())});
    }
    schema.tables.push_back(std::move(spec));
  }

  // Structural invariants.
  for (std::size_t i = 0; i < schema.tables.size(); ++i) {
    const TableSpec& t = schema.tables[i];
    for (std::size_t j = i + 1; j < schema.tables.size(); ++j) {
      if (schema.tables[j].name == t.name) {
        throw Error(ErrorCode::DuplicateTable, t.name);
      }
    }
    if (t.column_index(t.primary_key) < 0) {
      throw Error(ErrorCode::UnknownColumn,
                  t.name + ": primary key " + t.primary_key + " not among columns");
    }
    if (t.time_column && t.column_index(*t.time_column) < 0) {
      throw Error(ErrorCode::UnknownColumn,
                  t.name + ": time column " + *t.time_column + " not among columns");
    }
    for (const auto& fk : t.foreign_keys) {
      if (schema.table_index(fk.references_table) < 0) {
        throw Error(ErrorCode::UnknownTable,
                    t.name + "." + fk.column + " references " + fk.references_table);
      }
      if (t.column_index(fk.column) < 0) {
        throw Error(ErrorCode::UnknownColumn, t.name + ": FK column " + fk.column);
      }
      if (fk.column == t.primary_key) {
        throw Error(ErrorCode::ParseError,
                    t.name + ": FK column " + fk.column + " is the table's own PK");
      }
    }
  }
  return schema;
}

Schema load_schema(const std::string& path) {
  return schema_from_json(load_json(path));
}

const TableData& Database::table(const std::string& name) const {
  const int idx = schema.table_index(name);
  if (idx < 0) throw Error(ErrorCode::UnknownTable, name);
  return tables[static_cast<std::size_t>(idx)];
}

const TableSpec& Database::spec(const std::string& name) const {
  const int idx = schema.table_index(name);
  if (idx < 0) throw Error(ErrorCode::UnknownTable, name);
  return schema.tables[static_cast<std::size_t>(idx)];
}

Database load_database(const Schema& schema, const std::string& dir) {
  Database db;
  db.schema = schema;
  db.tables.resize(schema.tables.size());

  // Pass 1: load rows, columns, PK maps.
  for (std::size_t ti = 0; ti < schema.tables.size(); ++ti) {
    const TableSpec& spec = schema.tables[ti];
    TableData& data = db.tables[ti];
    const std::string path = dir.empty() ? spec.file : dir + "/" + spec.file;
    const CsvTable csv = read_csv(path);

    std::vector<int> col_pos(spec.columns.size());
    for (std::size_t ci = 0; ci < spec.columns.size(); ++ci) {
      const int pos = csv.column(spec.columns[ci].name);
      if (pos < 0) {
        throw Error(ErrorCode::UnknownColumn,
                    spec.name + ": missing column " + spec.columns[ci].name);
      }
      col_pos[ci] = pos;
    }

    const std::size_t n = csv.rows.size();
    data.row_count = n;
    data.numeric.resize(spec.columns.size());
    data.strings.resize(spec.columns.size());
    for (std::size_t ci = 0; ci < spec.columns.size(); ++ci) {
      if (spec.columns[ci].kind == ColumnKind::Numeric) {
        data.numeric[ci].values.assign(n, 0.0);
        data.numeric[ci].is_null.assign(n, 1);
      } else {
        data.strings[ci].values.assign(n, std::string());
        data.strings[ci].is_null.assign(n, 1);
      }
    }

    const int pk_ci = spec.column_index(spec.primary_key);
    data.pk_values.resize(n);
    data.pk_to_row.reserve(n * 2);

    data.has_time = spec.time_column.has_value();
    data.timestamps.assign(n, 0);
    data.timestamp_null.assign(n, 1);
    const int time_ci = data.has_time ? spec.column_index(*spec.time_column) : -1;

    for (std::size_t r = 0; r < n; ++r) {
      const auto& row = csv.rows[r];
      for (std::size_t ci = 0; ci < spec.columns.size(); ++ci) {
        const std::string& cell = row[static_cast<std::size_t>(col_pos[ci])];
        if (spec.columns[ci].kind == ColumnKind::Numeric) {
          double v = 0.0;
          if (cell.empty()) {
            // stays null
          } else if (parse_double(cell, v)) {
            data.numeric[ci].values[r] = v;
            data.numeric[ci].is_null[r] = 0;
          } else {
            ++data.numeric[ci].parse_warnings;
          }
        } else if (!cell.empty()) {
          data.strings[ci].values[r] = cell;
          data.strings[ci].is_null[r] = 0;
        }
      }

      const std::string& pk = row[static_cast<std::size_t>(col_pos[pk_ci])];
      if (pk.empty()) {
        throw Error(ErrorCode::DuplicatePrimaryKey,
                    spec.name + " row " + std::to_string(r + 2) + ": empty primary key");
      }
      auto [it, inserted] = data.pk_to_row.emplace(pk, static_cast<int>(r));
      if (!inserted) {
        throw Error(ErrorCode::DuplicatePrimaryKey, spec.name + ": " + pk);
      }
      data.pk_values[r] = pk;

      if (time_ci >= 0) {
        const std::string& cell = row[static_cast<std::size_t>(col_pos[time_ci])];
        if (!cell.empty()) {
          data.timestamps[r] = parse_timestamp(cell, spec.time_format);
          data.timestamp_null[r] = 0;
        }
      }
    }
  }

  // Pass 2: resolve FK references now that every PK map exists.
  for (std::size_t ti = 0; ti < schema.tables.size(); ++ti) {
    const TableSpec& spec = schema.tables[ti];
    TableData& data = db.tables[ti];
    data.fk_rows.resize(spec.foreign_keys.size());
    data.fk_null_count.assign(spec.foreign_keys.size(), 0);
    data.fk_dangling_count.assign(spec.foreign_keys.size(), 0);
    for (std::size_t fi = 0; fi < spec.foreign_keys.size(); ++fi) {
      const ForeignKeySpec& fk = spec.foreign_keys[fi];
      const int ref_ti = schema.table_index(fk.references_table);
      const TableData& ref = db.tables[static_cast<std::size_t>(ref_ti)];
      const int ci = spec.column_index(fk.column);
      auto& targets = data.fk_rows[fi];
      targets.assign(data.row_count, -1);

      const bool numeric_col = spec.columns[static_cast<std::size_t>(ci)].kind ==
                               ColumnKind::Numeric;
      for (std::size_t r = 0; r < data.row_count; ++r) {
        std::string key;
        bool null = true;
        if (numeric_col) {
          if (!data.numeric[ci].is_null[r]) {
            // FK stored numeric: normalize integral values to their PK string.
            const double v = data.numeric[ci].values[r];
            if (v == static_cast<double>(static_cast<long long>(v))) {
              key = std::to_string(static_cast<long long>(v));
            } else {
              key = std::to_string(v);
            }
            null = false;
          }
        } else if (!data.strings[ci].is_null[r]) {
          key = data.strings[ci].values[r];
          null = false;
        }
        if (null) {
          ++data.fk_null_count[fi];
          continue;
        }
        auto it = ref.pk_to_row.find(key);
        if (it == ref.pk_to_row.end()) {
          ++data.fk_dangling_count[fi];
        } else {
          targets[r] = it->second;
        }
      }
    }
  }
  return db;
}

}  // namespace relatron
