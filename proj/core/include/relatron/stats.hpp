#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace relatron {

double vec_mean(std::span<const double> xs);

// Population variance (divide by n).
double vec_variance(std::span<const double> xs);

double vec_std(std::span<const double> xs);

// Pearson correlation of paired samples. Throws DegenerateMetric if either
// side has zero variance or fewer than two pairs.
double pearson(std::span<const double> xs, std::span<const double> ys);

// Kendall's tau-b (tie-corrected). Throws DegenerateRanking when either
// vector is entirely tied or shorter than two entries.
double kendall_tau(std::span<const double> xs, std::span<const double> ys);

struct SummaryStats {
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  double mode = 0.0;           // midpoint of the densest of 10 equal bins
  double weighted_mean = 0.0;  // caller-supplied weights
};

// Aggregate statistics over per-metapath metric values. `weights` must match
// `values` in length; they are normalized internally.
SummaryStats summarize(std::span<const double> values,
                       std::span<const double> weights);

}  // namespace relatron
