#include "relatron/stats.hpp"

#include <algorithm>
#include <cmath>

#include "relatron/error.hpp"

namespace relatron {

double vec_mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double vec_variance(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  const double mu = vec_mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - mu) * (x - mu);
  return s / static_cast<double>(xs.size());
}

double vec_std(std::span<const double> xs) { return std::sqrt(vec_variance(xs)); }

double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw Error(ErrorCode::DegenerateMetric, "pearson needs >=2 paired samples");
  }
  const double mx = vec_mean(xs);
  const double my = vec_mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw Error(ErrorCode::DegenerateMetric, "pearson with zero-variance side");
  }
  return sxy / std::sqrt(sxx * syy);
}

double kendall_tau(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  if (n != ys.size() || n < 2) {
    throw Error(ErrorCode::DegenerateRanking, "kendall_tau needs >=2 paired samples");
  }
  long long concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = xs[i] - xs[j];
      const double dy = ys[i] - ys[j];
      if (dx == 0.0 && dy == 0.0) {
        ++ties_x;
        ++ties_y;
      } else if (dx == 0.0) {
        ++ties_x;
      } else if (dy == 0.0) {
        ++ties_y;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const long long n0 = static_cast<long long>(n) * (n - 1) / 2;
  const double denom_x = static_cast<double>(n0 - ties_x);
  const double denom_y = static_cast<double>(n0 - ties_y);
  if (denom_x <= 0.0 || denom_y <= 0.0) {
    throw Error(ErrorCode::DegenerateRanking, "all-tied ranking");
  }
  return static_cast<double>(concordant - discordant) / std::sqrt(denom_x * denom_y);
}

SummaryStats summarize(std::span<const double> values,
                       std::span<const double> weights) {
  SummaryStats out;
  if (values.empty()) return out;
  out.mean = vec_mean(values);
  out.stddev = vec_std(values);
  out.min = *std::min_element(values.begin(), values.end());
  out.max = *std::max_element(values.begin(), values.end());

  // Mode of a continuous sample: midpoint of the densest of 10 equal-width
  // bins spanning [min, max]; ties resolve to the lowest bin.
  if (out.max > out.min) {
    constexpr int kBins = 10;
    int counts[kBins] = {0};
    const double width = (out.max - out.min) / kBins;
    for (double v : values) {
      int b = static_cast<int>((v - out.min) / width);
      b = std::clamp(b, 0, kBins - 1);
      ++counts[b];
    }
    int best = 0;
    for (int b = 1; b < kBins; ++b) {
      if (counts[b] > counts[best]) best = b;
    }
    out.mode = out.min + (best + 0.5) * width;
  } else {
    out.mode = out.min;
  }

  double wsum = 0.0;
  for (double w : weights) wsum += w;
  if (weights.size() == values.size() && wsum > 0.0) {
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) acc += weights[i] * values[i];
    out.weighted_mean = acc / wsum;
  } else {
    out.weighted_mean = out.mean;
  }
  return out;
}

}  // namespace relatron
