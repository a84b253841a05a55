#include "relatron/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "relatron/error.hpp"

namespace relatron {

double roc_auc(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw Error(ErrorCode::DegenerateMetric, "roc_auc needs matched non-empty inputs");
  }
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  std::vector<double> rank(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }

  double rank_sum_pos = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (labels[k] > 0.5) {
      rank_sum_pos += rank[k];
      ++n_pos;
    }
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw Error(ErrorCode::DegenerateMetric, "roc_auc needs both classes");
  }
  return (rank_sum_pos - 0.5 * static_cast<double>(n_pos) * (n_pos + 1)) /
         (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double mean_absolute_error(std::span<const double> predictions,
                           std::span<const double> labels) {
  if (predictions.size() != labels.size() || predictions.empty()) {
    throw Error(ErrorCode::DegenerateMetric, "mae needs matched non-empty inputs");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    acc += std::abs(predictions[i] - labels[i]);
  }
  return acc / static_cast<double>(predictions.size());
}

double accuracy(std::span<const double> predictions, std::span<const double> labels) {
  if (predictions.size() != labels.size() || predictions.empty()) {
    throw Error(ErrorCode::DegenerateMetric, "accuracy needs matched non-empty inputs");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (std::llround(predictions[i]) == std::llround(labels[i])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double score_metric(const std::string& name, std::span<const double> predictions,
                    std::span<const double> labels, bool /*higher_is_better*/) {
  if (name == "roc_auc") return roc_auc(predictions, labels);
  if (name == "mae") return mean_absolute_error(predictions, labels);
  if (name == "accuracy") return accuracy(predictions, labels);
  throw Error(ErrorCode::DegenerateMetric, "unknown metric: " + name);
}

}  // namespace relatron
