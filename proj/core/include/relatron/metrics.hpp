#pragma once

#include <span>
#include <string>

namespace relatron {

// Rank-statistic ROC-AUC with average-rank tie handling. Labels are 0/1;
// throws DegenerateMetric when only one class is present.
double roc_auc(std::span<const double> scores, std::span<const double> labels);

double mean_absolute_error(std::span<const double> predictions,
                           std::span<const double> labels);

// Exact match on hard labels (predictions rounded to nearest integer).
double accuracy(std::span<const double> predictions, std::span<const double> labels);

// Dispatch by metric name (roc_auc | mae | accuracy). `higher_is_better` is
// carried for caller-side comparisons; the value itself is direction-free.
double score_metric(const std::string& name, std::span<const double> predictions,
                    std::span<const double> labels, bool higher_is_better);

// a is better than b under the metric direction.
inline bool score_better(double a, double b, bool higher_is_better) {
  return higher_is_better ? a > b : a < b;
}

}  // namespace relatron
