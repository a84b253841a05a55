#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace relatron {
namespace csbm {

struct MetapathProbabilities {
  double p = 0.0;  // edge probability for same-label pairs
  double q = 0.0;  // different-label pairs
};

// Solves (p, q) from the gate gamma = ln(p/q) and the expected degree, given
// the label prior.
MetapathProbabilities pq_from_gamma_degree(double gamma, double expected_degree, int n,
                                           double pi);

struct CsbmSpec {
  int n = 1000;
  double pi = 0.5;      // P(Y = +1)
  double delta = 1.0;   // class-mean separation of the feature score
  std::vector<MetapathProbabilities> metapaths;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CsbmInstance {
  std::vector<int> labels;       // +1 / -1
  std::vector<double> scores;    // psi(X_v) ~ N(label * delta / 2, 1)
  std::vector<std::vector<std::pair<int, int>>> edges;  // per metapath, u < v
};

CsbmInstance sample(const CsbmSpec& spec);
CsbmInstance sample(const CsbmSpec& spec, std::uint64_t seed);

// MAP per-neighbor message: clip(s, -gamma, gamma); for gamma < 0 it equals
// the sign-flipped clip at |gamma|.
double phi_max(double s, double gamma);

// z = ln(pi/(1-pi)) 1 + s + sum_m A_m phi_max(s; gamma_m); label = sign(z),
// with sign(0) = +1.
std::vector<double> map_scores(const CsbmInstance& instance, std::span<const double> gammas,
                               double pi);

// z = ln(pi/(1-pi)) 1 + s + sum_m A_m s.
std::vector<double> linear_scores(const CsbmInstance& instance, double pi);

double misclass_rate(std::span<const double> scores, std::span<const int> labels);

struct GammaAlpha {
  double gamma = 0.0;  // ln(p/q)
  double alpha = 0.0;  // (p-q)/(p+q) = tanh(gamma/2)
};

GammaAlpha gamma_alpha(double p, double q);

struct SnrReport {
  double rho_lin = 0.0;
  double rho_gate = 0.0;
  double delta = 0.0;
  double sigma2 = 0.0;  // max class-conditional variance + delta^2/4
  std::vector<double> gamma;
  std::vector<double> alpha;
  std::vector<double> degree;
  std::vector<double> sigma_tilde2;  // Monte Carlo per-metapath gated variance
};

double rho_lin_formula(std::span<const double> degree, std::span<const double> alpha,
                       double delta, double sigma2, double lambda = 1.0);
double rho_gate_formula(std::span<const double> degree, std::span<const double> alpha,
                        std::span<const double> gamma,
                        std::span<const double> sigma_tilde2, double lambda = 1.0);

// SNR proxies of a spec; sigma_tilde2 estimated with mc_samples >= 1000 draws
// per class. All-zero gates yield rho_gate = 0 by convention.
SnrReport snr(const CsbmSpec& spec, int mc_samples, std::uint64_t seed);

// Smoothed gate estimates from the edges among a labeled node subset;
// metapaths without a fully-labeled edge get gamma = 0 (gate off).
std::vector<double> estimate_gamma(const CsbmInstance& instance,
                                   std::span<const int> labeled_nodes);

struct GatingReport {
  double gated_mean = 0.0;
  double gated_std = 0.0;
  double linear_mean = 0.0;
  double linear_std = 0.0;
  std::vector<double> gated_errors;  // per seed
  std::vector<double> linear_errors;
};

// True-gate MAP vs linear aggregation over fresh instances.
GatingReport gating_experiment(const CsbmSpec& spec, int seeds);

struct CrossoverReport {
  std::vector<int> n_grid;
  std::vector<double> gated_mean_error;   // per N over seeds
  std::vector<double> gated_std_error;
  double linear_mean_error = 0.0;
  double linear_std_error = 0.0;
  std::vector<int> per_seed_crossover;    // smallest N with gated < linear; -1 none
  double detection_rate = 0.0;            // seeds with small-N linear win & large-N gated win
};

// Reveal-N gate estimation vs the fixed linear model, evaluated on a held-out
// node pool disjoint from the reveal pool.
CrossoverReport crossover_experiment(const CsbmSpec& spec, std::span<const int> n_grid,
                                     int seeds, int test_pool_size);

}  // namespace csbm
}  // namespace relatron
