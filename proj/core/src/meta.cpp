#include "relatron/meta.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "relatron/error.hpp"

namespace relatron {

namespace {

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index p = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd X(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return X;
}

void fit_logistic(MetaClassifier& meta) {
  // Newton iterations on the L2-regularized binary log-likelihood
  // (epsilon = 1e-4, intercept unpenalized), tolerance 1e-8.
  constexpr double kEps = 1e-4;
  constexpr double kTol = 1e-8;
  constexpr int kMaxIter = 100;

  const Eigen::MatrixXd X = to_matrix(meta.points);
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = meta.labels[static_cast<std::size_t>(i)];

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p + 1);  // [weights; intercept]
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const Eigen::VectorXd z =
        (X * beta.head(p)).array() + beta(p);
    const Eigen::VectorXd prob = 1.0 / (1.0 + (-z.array()).exp());
    Eigen::VectorXd grad(p + 1);
    grad.head(p) = X.transpose() * (prob - y) + kEps * beta.head(p);
    grad(p) = (prob - y).sum();

    const Eigen::VectorXd w = prob.array() * (1.0 - prob.array());
    Eigen::MatrixXd hessian = Eigen::MatrixXd::Zero(p + 1, p + 1);
    hessian.topLeftCorner(p, p) = X.transpose() * w.asDiagonal() * X;
    hessian.topLeftCorner(p, p).diagonal().array() += kEps;
    hessian.topRightCorner(p, 1) = X.transpose() * w;
    hessian.bottomLeftCorner(1, p) = (X.transpose() * w).transpose();
    hessian(p, p) = w.sum() + 1e-12;

    const Eigen::VectorXd delta = hessian.ldlt().solve(grad);
    beta -= delta;
    if (delta.norm() <= kTol) break;
  }
  meta.logistic_weights = beta.head(p);
  meta.logistic_intercept = beta(p);
}

}  // namespace

MetaClassifier fit_meta(const Bank& bank, const std::vector<TaskEmbedding>& embeddings,
                        MetaClassifier::Kind kind, WinnerBy by, int k) {
  if (embeddings.size() < 2) {
    throw Error(ErrorCode::TooFewTasks, "need >= 2 embeddings with winners");
  }
  if (k < 1 || k % 2 == 0) {
    throw Error(ErrorCode::InvalidArgument, "knn k must be odd and >= 1");
  }
  MetaClassifier meta;
  meta.kind = kind;
  meta.k = k;
  meta.normalizer = Normalizer::fit(embeddings);
  for (const TaskEmbedding& e : embeddings) {
    meta.tasks.push_back(e.task);
    meta.points.push_back(meta.normalizer.transform(e));
    meta.labels.push_back(winner(bank, e.task, by).family == "rdl" ? 1 : 0);
  }
  const int positives = std::accumulate(meta.labels.begin(), meta.labels.end(), 0);
  if (positives == 0 || positives == static_cast<int>(meta.labels.size())) {
    throw Error(ErrorCode::SingleFamilyBank, "bank winners cover a single family");
  }
  if (kind == MetaClassifier::Kind::Logistic) {
    fit_logistic(meta);
  }
  return meta;
}

RouteDecision predict(const MetaClassifier& meta, const TaskEmbedding& embedding) {
  const std::vector<double> x = meta.normalizer.transform(embedding);
  RouteDecision decision;

  if (meta.kind == MetaClassifier::Kind::Knn) {
    std::vector<std::pair<double, std::size_t>> by_distance;
    for (std::size_t i = 0; i < meta.points.size(); ++i) {
      double d2 = 0.0;
      for (std::size_t f = 0; f < x.size(); ++f) {
        const double diff = meta.points[i][f] - x[f];
        d2 += diff * diff;
      }
      by_distance.emplace_back(std::sqrt(d2), i);
    }
    std::sort(by_distance.begin(), by_distance.end());
    const std::size_t k = std::min(static_cast<std::size_t>(meta.k), by_distance.size());

    double vote_rdl = 0.0, vote_total = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      const auto [dist, idx] = by_distance[r];
      const double w = 1.0 / (dist + 1e-12);
      vote_total += w;
      if (meta.labels[idx] == 1) vote_rdl += w;
      decision.neighbors.push_back(meta.tasks[idx]);
    }
    const double share = vote_rdl / vote_total;
    decision.family = share >= 0.5 ? "rdl" : "dfs";
    decision.confidence = std::max(share, 1.0 - share);
    return decision;
  }

  double z = meta.logistic_intercept;
  for (std::size_t f = 0; f < x.size(); ++f) {
    z += meta.logistic_weights(static_cast<Eigen::Index>(f)) * x[f];
  }
  const double prob = 1.0 / (1.0 + std::exp(-z));
  decision.family = prob >= 0.5 ? "rdl" : "dfs";
  decision.confidence = std::max(prob, 1.0 - prob);

  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(meta.logistic_weights(static_cast<Eigen::Index>(a))) >
           std::abs(meta.logistic_weights(static_cast<Eigen::Index>(b)));
  });
  for (std::size_t r = 0; r < std::min<std::size_t>(5, order.size()); ++r) {
    decision.weights.emplace_back(
        meta.normalizer.registry().names[order[r]],
        meta.logistic_weights(static_cast<Eigen::Index>(order[r])));
  }
  return decision;
}

RouteDecision route(const MetaClassifier& meta, const TaskEmbedding& embedding,
                    std::optional<double> budget) {
  const bool trained_with_budget = meta.normalizer.registry().has_budget();
  if (trained_with_budget != budget.has_value()) {
    throw Error(ErrorCode::RegistryMismatch,
                trained_with_budget ? "meta trained with budget, none supplied"
                                    : "budget supplied to budget-free meta");
  }
  if (!budget) {
    return predict(meta, embedding);
  }
  TaskEmbedding augmented = embedding;
  const int slot = augmented.registry.index("budget");
  if (slot >= 0) {
    augmented.values[static_cast<std::size_t>(slot)] = *budget;
  } else {
    augmented.registry.names.push_back("budget");
    augmented.values.push_back(*budget);
  }
  return predict(meta, augmented);
}

LooReport loo_eval(const Bank& bank, const std::vector<TaskEmbedding>& embeddings,
                   MetaClassifier::Kind kind, WinnerBy by, int k) {
  if (embeddings.size() < 3) {
    throw Error(ErrorCode::TooFewTasks, "leave-one-out needs >= 3 tasks");
  }
  LooReport report;
  std::size_t hits = 0;
  for (std::size_t held = 0; held < embeddings.size(); ++held) {
    std::vector<TaskEmbedding> rest;
    rest.reserve(embeddings.size() - 1);
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
      if (i != held) rest.push_back(embeddings[i]);
    }
    const MetaClassifier meta = fit_meta(bank, rest, kind, by, k);
    const RouteDecision decision = predict(meta, embeddings[held]);
    const Winner truth = winner(bank, embeddings[held].task, by);
    LooFold fold;
    fold.task = embeddings[held].task;
    fold.truth = truth.family;
    fold.predicted = decision.family;
    fold.winner_margin = truth.margin;
    if (fold.truth == fold.predicted) ++hits;
    report.folds.push_back(std::move(fold));
  }
  report.accuracy = static_cast<double>(hits) / static_cast<double>(embeddings.size());
  return report;
}

}  // namespace relatron
