#include "relatron/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "relatron/error.hpp"
#include "relatron/stats.hpp"

namespace relatron {

SimilarityMatrix embedding_similarity(const std::vector<std::string>& tasks,
                                      const std::vector<std::vector<double>>& vectors) {
  if (tasks.size() != vectors.size() || tasks.size() < 2) {
    throw Error(ErrorCode::TooFewTasks, "need >= 2 embeddings");
  }
  const std::size_t n = tasks.size();
  SimilarityMatrix out;
  out.tasks = tasks;
  out.values.assign(n, std::vector<double>(n, 0.0));
  out.present.assign(n, std::vector<std::uint8_t>(n, 1));

  std::vector<double> norms(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (double x : vectors[i]) acc += x * x;
    norms[i] = std::sqrt(acc);
    if (norms[i] == 0.0) {
      out.diagnostics.push_back(tasks[i] + ": zero embedding vector");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i][i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double value = 0.0;
      if (norms[i] > 0.0 && norms[j] > 0.0) {
        double dot = 0.0;
        for (std::size_t f = 0; f < vectors[i].size(); ++f) {
          dot += vectors[i][f] * vectors[j][f];
        }
        value = dot / (norms[i] * norms[j]);
      }
      out.values[i][j] = out.values[j][i] = value;
    }
  }
  return out;
}

double similarity_agreement(const SimilarityMatrix& embedding_sim,
                            const SimilarityMatrix& ground_truth) {
  // Ground truth must cover the embedding tasks.
  std::vector<std::size_t> gt_index(embedding_sim.tasks.size());
  for (std::size_t i = 0; i < embedding_sim.tasks.size(); ++i) {
    const auto it = std::find(ground_truth.tasks.begin(), ground_truth.tasks.end(),
                              embedding_sim.tasks[i]);
    if (it == ground_truth.tasks.end()) {
      throw Error(ErrorCode::InvalidArgument,
                  "ground truth lacks task " + embedding_sim.tasks[i]);
    }
    gt_index[i] = static_cast<std::size_t>(it - ground_truth.tasks.begin());
  }

  double acc = 0.0;
  std::size_t rows = 0;
  for (std::size_t i = 0; i < embedding_sim.tasks.size(); ++i) {
    std::vector<double> mine, theirs;
    for (std::size_t j = 0; j < embedding_sim.tasks.size(); ++j) {
      if (j == i) continue;
      if (!ground_truth.present[gt_index[i]][gt_index[j]]) continue;
      mine.push_back(embedding_sim.values[i][j]);
      theirs.push_back(ground_truth.values[gt_index[i]][gt_index[j]]);
    }
    if (mine.size() < 2) continue;
    try {
      acc += kendall_tau(mine, theirs);
      ++rows;
    } catch (const Error&) {
      // all-tied row: skip
    }
  }
  if (rows == 0) {
    throw Error(ErrorCode::DegenerateRanking, "no row has >= 2 comparable entries");
  }
  return acc / static_cast<double>(rows);
}

namespace {

double agreement_of(const Eigen::MatrixXd& g, const std::vector<std::string>& tasks,
                    const std::vector<Eigen::VectorXd>& xs,
                    const SimilarityMatrix& ground_truth) {
  std::vector<std::vector<double>> projected;
  projected.reserve(xs.size());
  for (const Eigen::VectorXd& x : xs) {
    const Eigen::VectorXd y = g * x;
    projected.emplace_back(y.data(), y.data() + y.size());
  }
  return similarity_agreement(embedding_similarity(tasks, projected), ground_truth);
}

// d cos(u,v) / d u.
Eigen::VectorXd cosine_grad(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) return Eigen::VectorXd::Zero(u.size());
  const double c = u.dot(v) / (nu * nv);
  return v / (nu * nv) - c * u / (nu * nu);
}

}  // namespace

ProjectionResult train_projection(const std::vector<std::string>& tasks,
                                  const std::vector<std::vector<double>>& vectors,
                                  const SimilarityMatrix& ground_truth, double margin,
                                  int steps, double step_size) {
  if (tasks.size() < 3) {
    throw Error(ErrorCode::TooFewTasks, "projection training needs >= 3 tasks");
  }
  const Eigen::Index p = static_cast<Eigen::Index>(vectors.front().size());
  std::vector<Eigen::VectorXd> xs;
  xs.reserve(vectors.size());
  for (const auto& v : vectors) {
    xs.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), p));
  }

  // Triplets from ground-truth ordering: most similar = positive, least
  // similar = negative per anchor.
  std::vector<std::size_t> gt_index(tasks.size());
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto it =
        std::find(ground_truth.tasks.begin(), ground_truth.tasks.end(), tasks[i]);
    if (it == ground_truth.tasks.end()) {
      throw Error(ErrorCode::InvalidArgument, "ground truth lacks task " + tasks[i]);
    }
    gt_index[i] = static_cast<std::size_t>(it - ground_truth.tasks.begin());
  }
  struct Triplet {
    std::size_t anchor, positive, negative;
  };
  std::vector<Triplet> triplets;
  for (std::size_t a = 0; a < tasks.size(); ++a) {
    std::size_t best = a, worst = a;
    double best_sim = -2.0, worst_sim = 2.0;
    for (std::size_t j = 0; j < tasks.size(); ++j) {
      if (j == a || !ground_truth.present[gt_index[a]][gt_index[j]]) continue;
      const double sim = ground_truth.values[gt_index[a]][gt_index[j]];
      if (sim > best_sim) {
        best_sim = sim;
        best = j;
      }
      if (sim < worst_sim) {
        worst_sim = sim;
        worst = j;
      }
    }
    if (best != a && worst != a && best != worst) {
      triplets.push_back({a, best, worst});
    }
  }

  ProjectionResult result;
  result.projection = Eigen::MatrixXd::Identity(p, p);
  result.agreement_before = agreement_of(result.projection, tasks, xs, ground_truth);

  double step = step_size;
  int halvings = 0;
  for (int iter = 0; iter < steps; ++iter) {
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(p, p);
    double loss = 0.0;
    for (const Triplet& t : triplets) {
      const Eigen::VectorXd u = result.projection * xs[t.anchor];
      const Eigen::VectorXd v = result.projection * xs[t.positive];
      const Eigen::VectorXd w = result.projection * xs[t.negative];
      const double nu = u.norm(), nv = v.norm(), nw = w.norm();
      if (nu == 0.0 || nv == 0.0 || nw == 0.0) continue;
      const double cos_pos = u.dot(v) / (nu * nv);
      const double cos_neg = u.dot(w) / (nu * nw);
      const double hinge = margin - cos_pos + cos_neg;
      if (hinge <= 0.0) continue;
      loss += hinge;
      const Eigen::VectorXd du = -cosine_grad(u, v) + cosine_grad(u, w);
      const Eigen::VectorXd dv = -cosine_grad(v, u);
      const Eigen::VectorXd dw = cosine_grad(w, u);
      grad += du * xs[t.anchor].transpose() + dv * xs[t.positive].transpose() +
              dw * xs[t.negative].transpose();
    }
    result.final_loss = loss;
    if (loss == 0.0) {
      result.steps_run = iter;
      break;
    }
    Eigen::MatrixXd candidate = result.projection - step * grad;
    while (!candidate.allFinite()) {
      step *= 0.5;
      if (++halvings > 40) {
        throw Error(ErrorCode::DivergedProjection, "step halving exhausted");
      }
      candidate = result.projection - step * grad;
    }
    result.projection = std::move(candidate);
    result.steps_run = iter + 1;
  }

  result.agreement_after = agreement_of(result.projection, tasks, xs, ground_truth);
  return result;
}

}  // namespace relatron
