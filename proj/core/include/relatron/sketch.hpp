#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "relatron/graph.hpp"

namespace relatron {

// Edge tokens are the units the path kernel compares with the identity
// kernel. Directed edge types are in 1:1 correspondence with the
// (tail type, relation, head type) triples, so the edge type index doubles
// as the interned token id.
struct EdgeToken {
  int tail_type = 0;
  int edge_type = 0;
  int head_type = 0;
  int id = 0;
};

std::vector<EdgeToken> edge_tokens(const RelGraph& graph);

struct NodeRef {
  int type = 0;
  int row = 0;
};

struct SketchConfig {
  enum class Mode { Dense, Tensor };

  int width = 64;    // d
  int horizon = 2;   // T
  std::vector<double> length_weights;  // a_1..a_T; empty = all ones
  int beta_node_type = -1;             // restrict endpoint weight to one type; -1 = all
  Mode mode = Mode::Dense;
  std::uint64_t seed = 0;

  double length_weight(int length) const {
    if (length_weights.empty()) return 1.0;
    return length_weights[static_cast<std::size_t>(length - 1)];
  }
  double beta(int node_type) const {
    return (beta_node_type < 0 || beta_node_type == node_type) ? 1.0 : 0.0;
  }
  std::uint64_t fingerprint() const;
};

struct PathFeatureMatrix {
  std::vector<NodeRef> sources;
  int width = 0;
  std::vector<std::vector<double>> rows;  // one z(s) per source, in order
  std::uint64_t config_fingerprint = 0;
};

// Exact bag of typed path sequences out of a source: token sequence ->
// a_len * (beta-weighted count of directed walks carrying that sequence).
struct PathBag {
  std::map<std::vector<int>, double> weights;

  double inner(const PathBag& other) const;
  double squared_norm() const { return inner(*this); }
};

// Exhaustive walk enumeration up to the horizon. Throws OracleTooLarge when
// the walk count exceeds `cap`.
PathBag path_bag_oracle(const RelGraph& graph, NodeRef source, const SketchConfig& config,
                        std::size_t cap = 1000000);

// Bellman-Ford-style DP with per-(coordinate, layer, token) Rademacher signs;
// z_k(s) equals the sign-weighted sum over the source's path bag. No 1/sqrt(d)
// factor inside layers: the 1/d normalization lives only in kernel estimates.
PathFeatureMatrix dense_sketch(const RelGraph& graph, const SketchConfig& config,
                               std::span<const NodeRef> sources);

// Same DP carrying (bucket offset, sign) pairs per layer; coordinates realize
// a CountSketch of the typed-path bag with layer-wise combined hashes.
PathFeatureMatrix tensor_sketch(const RelGraph& graph, const SketchConfig& config,
                                std::span<const NodeRef> sources);

// (1/d) z(s) . z(s'), the unbiased estimate of <Psi_s, Psi_s'>.
double kernel_estimate(std::span<const double> z_a, std::span<const double> z_b);

// The sign code a dense-sketch coordinate applies to one token sequence:
// prod_l r_k^{(l)}(sigma_l). Exposed so exactness checks can expand bags.
int dense_sign(const SketchConfig& config, int coordinate, std::span<const int> sequence);

// Combined CountSketch bucket/sign of a token sequence under the tensor mode.
int tensor_bucket(const SketchConfig& config, std::span<const int> sequence);
int tensor_sign(const SketchConfig& config, std::span<const int> sequence);

}  // namespace relatron
