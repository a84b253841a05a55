#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "relatron/bank.hpp"
#include "relatron/embedding.hpp"

namespace relatron {

struct RouteDecision {
  std::string family;
  double confidence = 0.0;  // weighted vote share (knn) or probability (logistic)
  std::vector<std::string> neighbors;                    // knn contributors
  std::vector<std::pair<std::string, double>> weights;   // logistic top features
};

struct MetaClassifier {
  enum class Kind { Knn, Logistic };
  Kind kind = Kind::Knn;
  int k = 3;
  Normalizer normalizer;
  std::vector<std::string> tasks;
  std::vector<std::vector<double>> points;  // normalized embeddings
  std::vector<int> labels;                  // 1 = rdl, 0 = dfs
  Eigen::VectorXd logistic_weights;
  double logistic_intercept = 0.0;
};

// Trains on bank winners (one label per embedding's task). Both families must
// be represented; knn k defaults to 3 and must be odd.
MetaClassifier fit_meta(const Bank& bank, const std::vector<TaskEmbedding>& embeddings,
                        MetaClassifier::Kind kind, WinnerBy by = WinnerBy::Val, int k = 3);

RouteDecision predict(const MetaClassifier& meta, const TaskEmbedding& embedding);

// Budget-aware prediction: the query embedding is augmented with the budget
// feature; supplying (or omitting) a budget must match how the meta was
// trained.
RouteDecision route(const MetaClassifier& meta, const TaskEmbedding& embedding,
                    std::optional<double> budget);

struct LooFold {
  std::string task;
  std::string truth;
  std::string predicted;
  double winner_margin = 0.0;
};

struct LooReport {
  double accuracy = 0.0;
  std::vector<LooFold> folds;
};

// Leave-one-out routing accuracy; normalization is refit per fold without the
// held-out task.
LooReport loo_eval(const Bank& bank, const std::vector<TaskEmbedding>& embeddings,
                   MetaClassifier::Kind kind, WinnerBy by = WinnerBy::Val, int k = 3);

}  // namespace relatron
