#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "relatron/graph.hpp"
#include "relatron/task.hpp"

namespace relatron {

// Per-row numeric encodings: numeric columns z-scored (nulls become 0 after
// scoring), categorical columns feature-hashed into a capped one-hot block,
// text columns skipped.
struct EncodedTable {
  Eigen::MatrixXd features;  // rows x width; width 0 for all-text tables
  std::vector<std::string> slot_names;
  bool empty_warning = false;
};

EncodedTable encode_features(const Database& db, const std::string& table,
                             int hash_slots = 32);

// L rounds of typed mean-aggregate / concat / frozen Gaussian projection /
// ramp. L = 0 returns the encoded inputs unchanged. Output is one matrix per
// node type (all of width `width` once L >= 1).
std::vector<Eigen::MatrixXd> random_mp_hasher(const RelGraph& graph,
                                              const std::vector<Eigen::MatrixXd>& features,
                                              int layers, int width, std::uint64_t seed);

struct LinearHead {
  enum class Kind { Ridge, Lda };
  Kind kind = Kind::Ridge;
  Eigen::VectorXd weights;
  double intercept = 0.0;
  double lambda = 0.0;
  double fit_residual = 0.0;  // normal-equation residual norm (ridge)

  double predict(const Eigen::VectorXd& x) const { return weights.dot(x) + intercept; }
  Eigen::VectorXd predict_rows(const Eigen::MatrixXd& X) const;
};

// Ridge: exact solve of the centered normal equations (X'X + lambda I) w = X'y.
// LDA: pooled-covariance discriminant with shrinkage eps * mean(diag) * I.
LinearHead fit_head(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    LinearHead::Kind kind, double lambda = 1e-2,
                    double shrinkage = 1e-3);

struct AffinityConfig {
  std::vector<int> sketch_horizons = {1, 2, 3};
  std::vector<int> hasher_layers = {1, 2, 3};
  int width = 64;
  int hash_slots = 32;
  double ridge_lambda = 1e-2;
  std::uint64_t seed = 0;
};

struct AffinityScores {
  // Feature name -> validation score under the task metric; absent probes
  // carry no value and a reason in diagnostics.
  std::map<std::string, double> scores;
  std::vector<std::string> diagnostics;
};

// Training-free probes: frozen typed-path sketches (rfr_randomnbfnet_T),
// frozen message-passing hashers (rfr_randomsage_L), and one-/two-hop
// mean-aggregated raw-feature heads (feat_affinity_{1,2}hop).
AffinityScores affinity_scores(const Database& db, const RelGraph& graph,
                               const TaskTable& task, const AffinityConfig& config = {});

}  // namespace relatron
