#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relatron/io.hpp"

namespace relatron {

struct BankRecord {
  std::string task;
  std::string family;  // rdl | dfs
  json config;         // flat map of architecture/hyperparameter choices
  double val_score = 0.0;
  double test_score = 0.0;
  std::string metric;
  bool higher_is_better = true;
  std::optional<int> trial;
};

json bank_record_to_json(const BankRecord& record);
BankRecord bank_record_from_json(const json& doc);

struct Bank {
  std::vector<BankRecord> records;

  std::vector<std::string> tasks() const;  // unique, sorted
  std::vector<const BankRecord*> for_task(const std::string& task) const;
};

struct BankLoadReport {
  Bank bank;
  std::vector<std::string> line_errors;  // "line N: reason"
};

// JSONL, one record per line. Malformed lines are reported, not fatal.
BankLoadReport load_bank(const std::string& path);
void append_bank(const std::string& path, const BankRecord& record);

// Canonical sorted key=value signature of a config map; keys in the exclusion
// set (default: seed) are dropped so reruns of one architecture intersect.
std::string config_signature(const json& config,
                             const std::vector<std::string>& exclude = {"seed"});

enum class WinnerBy { Val, Test };

struct Winner {
  std::string family;
  double margin = 0.0;  // signed relative test gap, positive = rdl ahead
  const BankRecord* rdl_representative = nullptr;
  const BankRecord* dfs_representative = nullptr;
};

// Representative per family selected by `by`-score (direction-aware); the
// winner is the family whose representative has the better test score.
Winner winner(const Bank& bank, const std::string& task, WinnerBy by);

struct SimilarityMatrix {
  std::vector<std::string> tasks;
  std::vector<std::vector<double>> values;       // [-1, 1]; diagonal 1
  std::vector<std::vector<std::uint8_t>> present;
  std::vector<std::string> diagnostics;
};

// Ground-truth task similarity: Kendall's tau between the test-score rankings
// of config signatures shared by each task pair. Pairs sharing fewer than
// `min_shared` signatures are marked missing.
SimilarityMatrix graphgym_similarity(const Bank& bank, std::size_t min_shared = 2,
                                     const std::vector<std::string>& exclude = {"seed"});

ordered_json similarity_to_json(const SimilarityMatrix& matrix);
SimilarityMatrix similarity_from_json(const json& doc);

}  // namespace relatron
