#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relatron/io.hpp"
#include "relatron/rdb.hpp"

namespace relatron {

enum class TargetKind { Classification, Regression };

enum class Split { Train, Val, Test };

struct MetricSpec {
  std::string name;  // roc_auc | mae | accuracy
  bool higher_is_better = true;
};

struct TaskRow {
  int entity_row = -1;  // row index in the entity table
  std::int64_t timestamp = 0;
  double label = 0.0;  // class index for classification
  Split split = Split::Train;
};

struct TaskTable {
  std::string name;
  std::string entity_table;
  std::string entity_column;
  std::string time_column;
  TimeFormat time_format = TimeFormat::Iso8601;
  TargetKind target = TargetKind::Classification;
  int num_classes = 2;  // C; 1 conceptually for regression
  MetricSpec metric;
  int entity_count = 0;  // rows in the entity table
  std::vector<TaskRow> rows;

  std::vector<std::size_t> split_rows(Split split) const;
  std::size_t split_size(Split split) const;
  std::int64_t max_train_timestamp() const;
  int label_dim() const { return target == TargetKind::Classification ? num_classes : 1; }
};

// task.json header + rows CSV (entity_id, timestamp, label, split).
TaskTable load_task(const std::string& path, const Database& db);
TaskTable task_from_json(const json& doc, const std::string& base_dir, const Database& db);

// Temporally aggregated per-entity mean labels over train rows at or before
// the cutoff. Classification rows enter as one-hot vectors, so means are
// probability vectors; regression means are scalars (dim 1).
struct EntityLabelSummary {
  int dim = 1;
  std::vector<std::vector<double>> mean;  // size = entity_count; empty slot = absent
  std::vector<int> count;                 // contributing row counts

  bool has(int entity) const {
    return entity >= 0 && entity < static_cast<int>(count.size()) && count[entity] > 0;
  }
  std::size_t labeled_count() const;
};

EntityLabelSummary aggregate_labels(const TaskTable& task, std::int64_t cutoff);

}  // namespace relatron
