#include "relatron/csbm.hpp"

#include <algorithm>
#include <cmath>

#include "relatron/error.hpp"
#include "relatron/rng.hpp"
#include "relatron/stats.hpp"

namespace relatron {
namespace csbm {

namespace {

constexpr std::uint64_t kLabelTag = 0xC1;
constexpr std::uint64_t kScoreTag = 0xC2;
constexpr std::uint64_t kEdgeTag = 0xC3;
constexpr std::uint64_t kSigmaTag = 0xC4;

double prior_logit(double pi) { return std::log(pi / (1.0 - pi)); }

}  // namespace

MetapathProbabilities pq_from_gamma_degree(double gamma, double expected_degree, int n,
                                           double pi) {
  if (n < 2 || expected_degree <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "need n >= 2 and degree > 0");
  }
  // P(two random nodes share a label) under iid Bernoulli(pi) labels.
  const double p_same = pi * pi + (1.0 - pi) * (1.0 - pi);
  const double ratio = std::exp(gamma);
  const double q =
      expected_degree / (static_cast<double>(n - 1) * (p_same * ratio + (1.0 - p_same)));
  const double p = ratio * q;
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "gamma/degree combination leaves (0,1): p = " + std::to_string(p) +
                    ", q = " + std::to_string(q));
  }
  return {p, q};
}

void CsbmSpec::validate() const {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "n must be >= 1");
  if (!(pi > 0.0 && pi < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "pi must lie in (0,1)");
  }
  for (const MetapathProbabilities& m : metapaths) {
    if (!(m.p >= 0.0 && m.p < 1.0 && m.q >= 0.0 && m.q < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "edge probabilities must lie in [0,1)");
    }
  }
}

CsbmInstance sample(const CsbmSpec& spec) { return sample(spec, spec.seed); }

CsbmInstance sample(const CsbmSpec& spec, std::uint64_t seed) {
  spec.validate();
  CsbmInstance instance;
  instance.labels.resize(static_cast<std::size_t>(spec.n));
  instance.scores.resize(static_cast<std::size_t>(spec.n));

  // Streams are keyed per purpose and per metapath so appending a metapath
  // leaves all earlier draws untouched (paired-comparison experiments rely on
  // this).
  Rng label_rng = Rng::from_key(seed, {kLabelTag});
  for (int v = 0; v < spec.n; ++v) {
    instance.labels[static_cast<std::size_t>(v)] = label_rng.next_bernoulli(spec.pi) ? 1 : -1;
  }
  Rng score_rng = Rng::from_key(seed, {kScoreTag});
  for (int v = 0; v < spec.n; ++v) {
    instance.scores[static_cast<std::size_t>(v)] =
        instance.labels[static_cast<std::size_t>(v)] * spec.delta / 2.0 +
        score_rng.next_gaussian();
  }

  instance.edges.resize(spec.metapaths.size());
  for (std::size_t m = 0; m < spec.metapaths.size(); ++m) {
    const MetapathProbabilities& mp = spec.metapaths[m];
    if (mp.p == 0.0 && mp.q == 0.0) continue;
    Rng edge_rng = Rng::from_key(seed, {kEdgeTag, m});
    for (int u = 0; u < spec.n; ++u) {
      for (int v = u + 1; v < spec.n; ++v) {
        const bool same = instance.labels[static_cast<std::size_t>(u)] ==
                          instance.labels[static_cast<std::size_t>(v)];
        if (edge_rng.next_bernoulli(same ? mp.p : mp.q)) {
          instance.edges[m].emplace_back(u, v);
        }
      }
    }
  }
  return instance;
}

double phi_max(double s, double gamma) {
  if (gamma >= 0.0) {
    return std::clamp(s, -gamma, gamma);
  }
  return -std::clamp(s, gamma, -gamma);
}

std::vector<double> map_scores(const CsbmInstance& instance, std::span<const double> gammas,
                               double pi) {
  if (gammas.size() != instance.edges.size()) {
    throw Error(ErrorCode::InvalidArgument, "one gamma per metapath expected");
  }
  const std::size_t n = instance.scores.size();
  std::vector<double> z(n, prior_logit(pi));
  for (std::size_t v = 0; v < n; ++v) z[v] += instance.scores[v];
  for (std::size_t m = 0; m < instance.edges.size(); ++m) {
    const double gamma = gammas[m];
    if (gamma == 0.0) continue;  // gate off
    for (const auto& [u, v] : instance.edges[m]) {
      z[static_cast<std::size_t>(u)] += phi_max(instance.scores[static_cast<std::size_t>(v)], gamma);
      z[static_cast<std::size_t>(v)] += phi_max(instance.scores[static_cast<std::size_t>(u)], gamma);
    }
  }
  return z;
}

std::vector<double> linear_scores(const CsbmInstance& instance, double pi) {
  const std::size_t n = instance.scores.size();
  std::vector<double> z(n, prior_logit(pi));
  for (std::size_t v = 0; v < n; ++v) z[v] += instance.scores[v];
  for (const auto& metapath : instance.edges) {
    for (const auto& [u, v] : metapath) {
      z[static_cast<std::size_t>(u)] += instance.scores[static_cast<std::size_t>(v)];
      z[static_cast<std::size_t>(v)] += instance.scores[static_cast<std::size_t>(u)];
    }
  }
  return z;
}

double misclass_rate(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw Error(ErrorCode::InvalidArgument, "matched non-empty inputs expected");
  }
  std::size_t wrong = 0;
  for (std::size_t v = 0; v < scores.size(); ++v) {
    const int predicted = scores[v] >= 0.0 ? 1 : -1;  // sign(0) = +1
    if (predicted != labels[v]) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(scores.size());
}

GammaAlpha gamma_alpha(double p, double q) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "p, q must lie in (0,1)");
  }
  return {std::log(p / q), (p - q) / (p + q)};
}

double rho_lin_formula(std::span<const double> degree, std::span<const double> alpha,
                       double delta, double sigma2, double lambda) {
  double numerator = 0.0, denominator = 0.0;
  for (std::size_t m = 0; m < degree.size(); ++m) {
    numerator += degree[m] * alpha[m] * delta;
    denominator += degree[m] * sigma2;
  }
  if (denominator <= 0.0) return 0.0;
  return numerator * numerator / (lambda * denominator);
}

double rho_gate_formula(std::span<const double> degree, std::span<const double> alpha,
                        std::span<const double> gamma,
                        std::span<const double> sigma_tilde2, double lambda) {
  double numerator = 0.0, denominator = 0.0;
  for (std::size_t m = 0; m < degree.size(); ++m) {
    numerator += degree[m] * alpha[m] * gamma[m];
    denominator += degree[m] * sigma_tilde2[m];
  }
  if (denominator <= 0.0) return 0.0;  // all gates off: 0/0 resolves to 0
  return numerator * numerator / (lambda * denominator);
}

SnrReport snr(const CsbmSpec& spec, int mc_samples, std::uint64_t seed) {
  spec.validate();
  if (mc_samples < 1000) {
    throw Error(ErrorCode::InvalidArgument, "snr needs mc_samples >= 1000");
  }
  SnrReport report;
  report.delta = spec.delta;
  // Class-conditional score variances are 1 by construction.
  report.sigma2 = 1.0 + spec.delta * spec.delta / 4.0;

  const double p_same = spec.pi * spec.pi + (1.0 - spec.pi) * (1.0 - spec.pi);
  for (std::size_t m = 0; m < spec.metapaths.size(); ++m) {
    const MetapathProbabilities& mp = spec.metapaths[m];
    const GammaAlpha ga = gamma_alpha(mp.p, mp.q);
    report.gamma.push_back(ga.gamma);
    report.alpha.push_back(ga.alpha);
    report.degree.push_back(static_cast<double>(spec.n - 1) *
                            (p_same * mp.p + (1.0 - p_same) * mp.q));

    // Max class-conditional variance of the gated message, Monte Carlo.
    Rng rng = Rng::from_key(seed, {kSigmaTag, m});
    double worst = 0.0;
    for (const double mean : {spec.delta / 2.0, -spec.delta / 2.0}) {
      std::vector<double> draws;
      draws.reserve(static_cast<std::size_t>(mc_samples));
      for (int i = 0; i < mc_samples; ++i) {
        draws.push_back(phi_max(mean + rng.next_gaussian(), ga.gamma));
      }
      worst = std::max(worst, vec_variance(draws));
    }
    report.sigma_tilde2.push_back(worst);
  }

  report.rho_lin =
      rho_lin_formula(report.degree, report.alpha, report.delta, report.sigma2);
  report.rho_gate = rho_gate_formula(report.degree, report.alpha, report.gamma,
                                     report.sigma_tilde2);
  return report;
}

std::vector<double> estimate_gamma(const CsbmInstance& instance,
                                   std::span<const int> labeled_nodes) {
  std::vector<std::uint8_t> labeled(instance.labels.size(), 0);
  long long n_pos = 0, n_neg = 0;
  for (int v : labeled_nodes) {
    if (v < 0 || v >= static_cast<int>(instance.labels.size())) {
      throw Error(ErrorCode::InvalidArgument, "labeled node out of range");
    }
    if (labeled[static_cast<std::size_t>(v)]) continue;
    labeled[static_cast<std::size_t>(v)] = 1;
    (instance.labels[static_cast<std::size_t>(v)] > 0 ? n_pos : n_neg) += 1;
  }
  const double same_pairs =
      0.5 * (static_cast<double>(n_pos) * (n_pos - 1) + static_cast<double>(n_neg) * (n_neg - 1));
  const double diff_pairs = static_cast<double>(n_pos) * static_cast<double>(n_neg);

  std::vector<double> gammas;
  gammas.reserve(instance.edges.size());
  for (const auto& metapath : instance.edges) {
    long long same_edges = 0, diff_edges = 0;
    for (const auto& [u, v] : metapath) {
      if (!labeled[static_cast<std::size_t>(u)] || !labeled[static_cast<std::size_t>(v)]) {
        continue;
      }
      if (instance.labels[static_cast<std::size_t>(u)] ==
          instance.labels[static_cast<std::size_t>(v)]) {
        ++same_edges;
      } else {
        ++diff_edges;
      }
    }
    if (same_edges + diff_edges == 0) {
      gammas.push_back(0.0);  // gate off when no labeled edge exists
      continue;
    }
    const double p_hat = (static_cast<double>(same_edges) + 1.0) / (same_pairs + 2.0);
    const double q_hat = (static_cast<double>(diff_edges) + 1.0) / (diff_pairs + 2.0);
    gammas.push_back(std::log(p_hat / q_hat));
  }
  return gammas;
}

GatingReport gating_experiment(const CsbmSpec& spec, int seeds) {
  spec.validate();
  if (seeds < 10) {
    throw Error(ErrorCode::InvalidArgument, "gating experiment needs >= 10 seeds");
  }
  std::vector<double> true_gamma;
  for (const MetapathProbabilities& mp : spec.metapaths) {
    true_gamma.push_back(gamma_alpha(mp.p, mp.q).gamma);
  }

  GatingReport report;
  for (int s = 0; s < seeds; ++s) {
    const CsbmInstance instance = sample(spec, derive_key(spec.seed, {0xD0, static_cast<std::uint64_t>(s)}));
    report.gated_errors.push_back(
        misclass_rate(map_scores(instance, true_gamma, spec.pi), instance.labels));
    report.linear_errors.push_back(
        misclass_rate(linear_scores(instance, spec.pi), instance.labels));
  }
  report.gated_mean = vec_mean(report.gated_errors);
  report.gated_std = vec_std(report.gated_errors);
  report.linear_mean = vec_mean(report.linear_errors);
  report.linear_std = vec_std(report.linear_errors);
  return report;
}

CrossoverReport crossover_experiment(const CsbmSpec& spec, std::span<const int> n_grid,
                                     int seeds, int test_pool_size) {
  spec.validate();
  if (n_grid.empty() || test_pool_size < 1 || seeds < 1) {
    throw Error(ErrorCode::InvalidArgument, "need a grid, seeds and a test pool");
  }
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] <= n_grid[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "N grid must increase");
    }
  }
  const int reveal_pool = spec.n - test_pool_size;
  if (n_grid.back() > reveal_pool) {
    throw Error(ErrorCode::InvalidArgument, "largest N exceeds the reveal pool");
  }

  CrossoverReport report;
  report.n_grid.assign(n_grid.begin(), n_grid.end());
  std::vector<std::vector<double>> gated(n_grid.size());
  std::vector<double> linear;

  for (int s = 0; s < seeds; ++s) {
    const CsbmInstance instance =
        sample(spec, derive_key(spec.seed, {0xD1, static_cast<std::uint64_t>(s)}));

    // Held-out pool: the last nodes; reveal sets are nested prefixes.
    std::vector<int> test_nodes;
    std::vector<int> test_labels_vec;
    for (int v = reveal_pool; v < spec.n; ++v) {
      test_nodes.push_back(v);
      test_labels_vec.push_back(instance.labels[static_cast<std::size_t>(v)]);
    }
    auto eval_on_test = [&](const std::vector<double>& z) {
      std::vector<double> subset;
      subset.reserve(test_nodes.size());
      for (int v : test_nodes) subset.push_back(z[static_cast<std::size_t>(v)]);
      return misclass_rate(subset, test_labels_vec);
    };

    const double linear_error = eval_on_test(linear_scores(instance, spec.pi));
    linear.push_back(linear_error);

    int crossover = -1;
    double first_gated = 0.0, last_gated = 0.0;
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
      std::vector<int> revealed(static_cast<std::size_t>(n_grid[gi]));
      for (int v = 0; v < n_grid[gi]; ++v) revealed[static_cast<std::size_t>(v)] = v;
      const std::vector<double> gamma_hat = estimate_gamma(instance, revealed);
      const double gated_error = eval_on_test(map_scores(instance, gamma_hat, spec.pi));
      gated[gi].push_back(gated_error);
      if (gi == 0) first_gated = gated_error;
      if (gi + 1 == n_grid.size()) last_gated = gated_error;
      if (crossover < 0 && gated_error < linear_error) crossover = n_grid[gi];
    }
    const bool detected = first_gated > linear_error && last_gated < linear_error;
    report.per_seed_crossover.push_back(detected ? crossover : -1);
    if (detected) report.detection_rate += 1.0;
  }

  report.detection_rate /= static_cast<double>(seeds);
  for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
    report.gated_mean_error.push_back(vec_mean(gated[gi]));
    report.gated_std_error.push_back(vec_std(gated[gi]));
  }
  report.linear_mean_error = vec_mean(linear);
  report.linear_std_error = vec_std(linear);
  return report;
}

}  // namespace csbm
}  // namespace relatron
