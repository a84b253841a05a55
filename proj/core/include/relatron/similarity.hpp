#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "relatron/bank.hpp"
#include "relatron/embedding.hpp"

namespace relatron {

// Pairwise cosine similarity over normalized embedding vectors. Zero vectors
// get similarity 0 against everything (diagonals stay 1) plus a diagnostic.
SimilarityMatrix embedding_similarity(const std::vector<std::string>& tasks,
                                      const std::vector<std::vector<double>>& vectors);

// Mean per-task Kendall tau between the embedding-similarity ranking of the
// other tasks and the ground-truth ranking; missing ground-truth entries are
// excluded pairwise, rows with < 2 comparable entries are skipped.
double similarity_agreement(const SimilarityMatrix& embedding_sim,
                            const SimilarityMatrix& ground_truth);

struct ProjectionResult {
  Eigen::MatrixXd projection;  // g, initialized at identity
  double agreement_before = 0.0;
  double agreement_after = 0.0;
  double final_loss = 0.0;
  int steps_run = 0;
};

// Margin-ranking refinement of a linear map g over task embeddings: for each
// anchor the most/least ground-truth-similar tasks form a triplet and g
// descends sum max(0, margin - cos(ga, gp) + cos(ga, gn)) with analytic
// cosine gradients. Non-finite steps halve the step size; persistent
// divergence throws DivergedProjection.
ProjectionResult train_projection(const std::vector<std::string>& tasks,
                                  const std::vector<std::vector<double>>& vectors,
                                  const SimilarityMatrix& ground_truth, double margin,
                                  int steps, double step_size);

}  // namespace relatron
