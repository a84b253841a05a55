#include "relatron/task.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <limits>

#include "relatron/csv.hpp"
#include "relatron/error.hpp"

namespace relatron {

namespace {

Split parse_split(const std::string& text) {
  if (text == "train") return Split::Train;
  if (text == "val") return Split::Val;
  if (text == "test") return Split::Test;
  throw Error(ErrorCode::BadSplit, text);
}

double parse_label(const std::string& text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::BadLabel, text);
  }
  return v;
}

}  // namespace

std::vector<std::size_t> TaskTable::split_rows(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].split == split) out.push_back(i);
  }
  return out;
}

std::size_t TaskTable::split_size(Split split) const {
  std::size_t n = 0;
  for (const TaskRow& row : rows) {
    if (row.split == split) ++n;
  }
  return n;
}

std::int64_t TaskTable::max_train_timestamp() const {
  std::int64_t best = std::numeric_limits<std::int64_t>::min();
  for (const TaskRow& row : rows) {
    if (row.split == Split::Train) best = std::max(best, row.timestamp);
  }
  return best;
}

TaskTable task_from_json(const json& doc, const std::string& base_dir, const Database& db) {
  TaskTable task;
  task.name = doc.at("name").get<std::string>();
  task.entity_table = doc.at("entity_table").get<std::string>();
  task.entity_column = doc.at("entity_column").get<std::string>();
  task.time_column = doc.value("time_column", std::string("timestamp"));
  if (doc.contains("time_format")) {
    task.time_format = doc["time_format"].get<std::string>() == "epoch"
                           ? TimeFormat::EpochSeconds
                           : TimeFormat::Iso8601;
  }

  const auto& target = doc.at("target");
  const std::string kind = target.at("kind").get<std::string>();
  if (kind == "classification") {
    task.target = TargetKind::Classification;
    task.num_classes = target.at("classes").get<int>();
    if (task.num_classes < 2) {
      throw Error(ErrorCode::BadLabel, "classification needs >=2 classes");
    }
  } else if (kind == "regression") {
    task.target = TargetKind::Regression;
    task.num_classes = 1;
  } else {
    throw Error(ErrorCode::ParseError, "unknown target kind: " + kind);
  }

  const auto& metric = doc.at("metric");
  task.metric.name = metric.at("name").get<std::string>();
  task.metric.higher_is_better = metric.at("higher_is_better").get<bool>();
  if (task.metric.name != "roc_auc" && task.metric.name != "mae" &&
      task.metric.name != "accuracy") {
    throw Error(ErrorCode::ParseError, "unknown metric: " + task.metric.name);
  }

  const TableData& entity_data = db.table(task.entity_table);
  task.entity_count = static_cast<int>(entity_data.row_count);

  const std::string rows_file = doc.at("rows_file").get<std::string>();
  const std::string rows_path =
      base_dir.empty() ? rows_file : base_dir + "/" + rows_file;
  const CsvTable csv = read_csv(rows_path);
  const int c_entity = csv.column("entity_id");
  const int c_time = csv.column("timestamp");
  const int c_label = csv.column("label");
  const int c_split = csv.column("split");
  if (c_entity < 0 || c_time < 0 || c_label < 0 || c_split < 0) {
    throw Error(ErrorCode::UnknownColumn,
                rows_path + ": needs entity_id, timestamp, label, split");
  }

  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& cells = csv.rows[r];
    TaskRow row;
    const std::string& entity_id = cells[static_cast<std::size_t>(c_entity)];
    auto it = entity_data.pk_to_row.find(entity_id);
    if (it == entity_data.pk_to_row.end()) {
      throw Error(ErrorCode::UnknownEntity,
                  task.name + " row " + std::to_string(r + 2) + ": " + entity_id);
    }
    row.entity_row = it->second;
    row.timestamp = parse_timestamp(cells[static_cast<std::size_t>(c_time)], task.time_format);
    row.label = parse_label(cells[static_cast<std::size_t>(c_label)]);
    if (task.target == TargetKind::Classification) {
      const int cls = static_cast<int>(row.label);
      if (row.label != cls || cls < 0 || cls >= task.num_classes) {
        throw Error(ErrorCode::BadLabel,
                    "class index out of [0," + std::to_string(task.num_classes) + "): " +
                        cells[static_cast<std::size_t>(c_label)]);
      }
    }
    row.split = parse_split(cells[static_cast<std::size_t>(c_split)]);
    task.rows.push_back(row);
  }

  if (task.split_size(Split::Train) == 0) {
    throw Error(ErrorCode::EmptySplit, task.name + ": train split empty");
  }
  if (task.split_size(Split::Val) == 0) {
    throw Error(ErrorCode::EmptySplit, task.name + ": val split empty");
  }
  return task;
}

TaskTable load_task(const std::string& path, const Database& db) {
  const json doc = load_json(path);
  const std::string base_dir = std::filesystem::path(path).parent_path().string();
  return task_from_json(doc, base_dir, db);
}

std::size_t EntityLabelSummary::labeled_count() const {
  std::size_t n = 0;
  for (int c : count) {
    if (c > 0) ++n;
  }
  return n;
}

EntityLabelSummary aggregate_labels(const TaskTable& task, std::int64_t cutoff) {
  EntityLabelSummary summary;
  summary.dim = task.label_dim();
  summary.mean.assign(static_cast<std::size_t>(task.entity_count), {});
  summary.count.assign(static_cast<std::size_t>(task.entity_count), 0);

  for (const TaskRow& row : task.rows) {
    if (row.split != Split::Train || row.timestamp > cutoff) continue;
    auto& acc = summary.mean[static_cast<std::size_t>(row.entity_row)];
    if (acc.empty()) acc.assign(static_cast<std::size_t>(summary.dim), 0.0);
    if (task.target == TargetKind::Classification) {
      acc[static_cast<std::size_t>(row.label)] += 1.0;
    } else {
      acc[0] += row.label;
    }
    ++summary.count[static_cast<std::size_t>(row.entity_row)];
  }
  for (std::size_t e = 0; e < summary.mean.size(); ++e) {
    if (summary.count[e] > 0) {
      for (double& x : summary.mean[e]) x /= summary.count[e];
    }
  }
  return summary;
}

}  // namespace relatron
