#include "relatron/bank.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "relatron/error.hpp"
#include "relatron/metrics.hpp"
#include "relatron/stats.hpp"

namespace relatron {

json bank_record_to_json(const BankRecord& record) {
  json doc;
  doc["task"] = record.task;
  doc["family"] = record.family;
  doc["config"] = record.config;
  doc["val_score"] = record.val_score;
  doc["test_score"] = record.test_score;
  doc["metric"] = record.metric;
  doc["higher_is_better"] = record.higher_is_better;
  if (record.trial) doc["trial"] = *record.trial;
  return doc;
}

BankRecord bank_record_from_json(const json& doc) {
  BankRecord record;
  record.task = doc.at("task").get<std::string>();
  record.family = doc.at("family").get<std::string>();
  if (record.family != "rdl" && record.family != "dfs") {
    throw Error(ErrorCode::ParseError, "family must be rdl or dfs: " + record.family);
  }
  record.config = doc.at("config");
  if (!record.config.is_object() || record.config.empty()) {
    throw Error(ErrorCode::ParseError, "config must be a non-empty map");
  }
  record.val_score = doc.at("val_score").get<double>();
  record.test_score = doc.at("test_score").get<double>();
  if (!std::isfinite(record.val_score) || !std::isfinite(record.test_score)) {
    throw Error(ErrorCode::ParseError, "scores must be finite");
  }
  record.metric = doc.at("metric").get<std::string>();
  record.higher_is_better = doc.at("higher_is_better").get<bool>();
  if (doc.contains("trial") && !doc["trial"].is_null()) {
    record.trial = doc["trial"].get<int>();
  }
  return record;
}

std::vector<std::string> Bank::tasks() const {
  std::set<std::string> unique;
  for (const BankRecord& record : records) unique.insert(record.task);
  return {unique.begin(), unique.end()};
}

std::vector<const BankRecord*> Bank::for_task(const std::string& task) const {
  std::vector<const BankRecord*> out;
  for (const BankRecord& record : records) {
    if (record.task == task) out.push_back(&record);
  }
  return out;
}

BankLoadReport load_bank(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::MissingFile, path);
  }
  BankLoadReport report;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded()) {
      report.line_errors.push_back("line " + std::to_string(line_no) + ": invalid JSON");
      continue;
    }
    try {
      report.bank.records.push_back(bank_record_from_json(doc));
    } catch (const std::exception& e) {
      report.line_errors.push_back("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return report;
}

void append_bank(const std::string& path, const BankRecord& record) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) {
    throw Error(ErrorCode::MissingFile, "cannot open for append: " + path);
  }
  out << bank_record_to_json(record).dump() << "\n";
}

std::string config_signature(const json& config, const std::vector<std::string>& exclude) {
  std::map<std::string, std::string> entries;
  for (const auto& [key, value] : config.items()) {
    if (std::find(exclude.begin(), exclude.end(), key) != exclude.end()) continue;
    entries[key] = value.dump();
  }
  std::ostringstream out;
  bool first = true;
  for (const auto& [key, value] : entries) {
    if (!first) out << ";";
    out << key << "=" << value;
    first = false;
  }
  return out.str();
}

Winner winner(const Bank& bank, const std::string& task, WinnerBy by) {
  const BankRecord* best_rdl = nullptr;
  const BankRecord* best_dfs = nullptr;
  for (const BankRecord& record : bank.records) {
    if (record.task != task) continue;
    const BankRecord*& slot = record.family == "rdl" ? best_rdl : best_dfs;
    if (slot == nullptr) {
      slot = &record;
      continue;
    }
    const double cur = by == WinnerBy::Val ? record.val_score : record.test_score;
    const double old = by == WinnerBy::Val ? slot->val_score : slot->test_score;
    if (score_better(cur, old, record.higher_is_better)) slot = &record;
  }
  if (best_rdl == nullptr || best_dfs == nullptr) {
    throw Error(ErrorCode::IncompleteTask, task + " lacks rdl or dfs trials");
  }

  Winner result;
  result.rdl_representative = best_rdl;
  result.dfs_representative = best_dfs;
  const double direction = best_rdl->higher_is_better ? 1.0 : -1.0;
  const double scale = std::max(std::abs(best_dfs->test_score), 1e-12);
  result.margin = direction * (best_rdl->test_score - best_dfs->test_score) / scale;
  // Exact tie goes to dfs, the cheaper family.
  result.family = result.margin > 0.0 ? "rdl" : "dfs";
  return result;
}

SimilarityMatrix graphgym_similarity(const Bank& bank, std::size_t min_shared,
                                     const std::vector<std::string>& exclude) {
  SimilarityMatrix out;
  out.tasks = bank.tasks();
  const std::size_t n = out.tasks.size();
  out.values.assign(n, std::vector<double>(n, 0.0));
  out.present.assign(n, std::vector<std::uint8_t>(n, 0));

  // Per task: signature -> best observed test score (direction-normalized so
  // larger is always better in the ranking).
  std::vector<std::map<std::string, double>> scores(n);
  for (const BankRecord& record : bank.records) {
    const std::size_t ti = static_cast<std::size_t>(
        std::lower_bound(out.tasks.begin(), out.tasks.end(), record.task) -
        out.tasks.begin());
    const std::string sig = config_signature(record.config, exclude);
    const double value =
        record.higher_is_better ? record.test_score : -record.test_score;
    auto [it, inserted] = scores[ti].emplace(sig, value);
    if (!inserted) it->second = std::max(it->second, value);
  }

  for (std::size_t i = 0; i < n; ++i) {
    out.values[i][i] = 1.0;
    out.present[i][i] = 1;
    for (std::size_t j = i + 1; j < n; ++j) {
      std::vector<double> a, b;
      for (const auto& [sig, value] : scores[i]) {
        auto it = scores[j].find(sig);
        if (it == scores[j].end()) continue;
        a.push_back(value);
        b.push_back(it->second);
      }
      if (a.size() < min_shared) {
        out.diagnostics.push_back(out.tasks[i] + " / " + out.tasks[j] + ": only " +
                                  std::to_string(a.size()) + " shared configs");
        continue;
      }
      try {
        const double tau = kendall_tau(a, b);
        out.values[i][j] = out.values[j][i] = tau;
        out.present[i][j] = out.present[j][i] = 1;
      } catch (const Error& e) {
        out.diagnostics.push_back(out.tasks[i] + " / " + out.tasks[j] + ": " + e.what());
      }
    }
  }
  return out;
}

ordered_json similarity_to_json(const SimilarityMatrix& matrix) {
  ordered_json doc;
  doc["format_version"] = 1;
  doc["tasks"] = matrix.tasks;
  doc["values"] = matrix.values;
  doc["present"] = matrix.present;
  doc["diagnostics"] = matrix.diagnostics;
  return doc;
}

SimilarityMatrix similarity_from_json(const json& doc) {
  check_format_version(doc, "similarity matrix");
  SimilarityMatrix out;
  out.tasks = doc.at("tasks").get<std::vector<std::string>>();
  out.values = doc.at("values").get<std::vector<std::vector<double>>>();
  out.present = doc.at("present").get<std::vector<std::vector<std::uint8_t>>>();
  if (doc.contains("diagnostics")) {
    out.diagnostics = doc["diagnostics"].get<std::vector<std::string>>();
  }
  return out;
}

}  // namespace relatron
