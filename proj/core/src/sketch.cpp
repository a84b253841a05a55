#include "relatron/sketch.hpp"

#include <functional>

#include "relatron/error.hpp"
#include "relatron/rng.hpp"

namespace relatron {

namespace {

// Stream tags keep the sign, bucket, and tensor-sign families independent.
constexpr std::uint64_t kDenseSignTag = 0x51;
constexpr std::uint64_t kTensorBucketTag = 0x52;
constexpr std::uint64_t kTensorSignTag = 0x53;

std::vector<int> node_offsets(const RelGraph& graph) {
  std::vector<int> offsets(graph.node_counts.size() + 1, 0);
  for (std::size_t t = 0; t < graph.node_counts.size(); ++t) {
    offsets[t + 1] = offsets[t] + graph.node_counts[t];
  }
  return offsets;
}

}  // namespace

std::vector<EdgeToken> edge_tokens(const RelGraph& graph) {
  std::vector<EdgeToken> tokens;
  tokens.reserve(graph.edge_types.size());
  for (std::size_t t = 0; t < graph.edge_types.size(); ++t) {
    const EdgeType& et = graph.edge_types[t];
    tokens.push_back({et.src_type, static_cast<int>(t), et.dst_type, static_cast<int>(t)});
  }
  return tokens;
}

std::uint64_t SketchConfig::fingerprint() const {
  std::uint64_t h = derive_key(seed, {static_cast<std::uint64_t>(width),
                                      static_cast<std::uint64_t>(horizon),
                                      static_cast<std::uint64_t>(mode == Mode::Dense ? 0 : 1),
                                      static_cast<std::uint64_t>(beta_node_type + 1)});
  for (double w : length_weights) {
    std::uint64_t bits = 0;
    static_assert(sizeof(bits) == sizeof(w));
    __builtin_memcpy(&bits, &w, sizeof(bits));
    h = derive_key(h, {bits});
  }
  return h;
}

double PathBag::inner(const PathBag& other) const {
  double acc = 0.0;
  for (const auto& [sequence, weight] : weights) {
    auto it = other.weights.find(sequence);
    if (it != other.weights.end()) acc += weight * it->second;
  }
  return acc;
}

PathBag path_bag_oracle(const RelGraph& graph, NodeRef source, const SketchConfig& config,
                        std::size_t cap) {
  PathBag bag;
  std::size_t visited = 0;
  std::vector<int> sequence;

  // Depth-first walk enumeration; (type, row)-local node addressing follows
  // each edge type's CSR directly.
  std::function<void(int, int, int)> expand = [&](int type, int row, int depth) {
    if (depth == config.horizon) return;
    for (std::size_t t = 0; t < graph.edge_types.size(); ++t) {
      const EdgeType& et = graph.edge_types[t];
      if (et.src_type != type) continue;
      for (int k = et.offsets[static_cast<std::size_t>(row)];
           k < et.offsets[static_cast<std::size_t>(row) + 1]; ++k) {
        const int next = et.neighbors[static_cast<std::size_t>(k)];
        if (++visited > cap) {
          throw Error(ErrorCode::OracleTooLarge,
                      "walk count exceeds cap " + std::to_string(cap));
        }
        sequence.push_back(static_cast<int>(t));
        bag.weights[sequence] +=
            config.length_weight(depth + 1) * config.beta(et.dst_type);
        expand(et.dst_type, next, depth + 1);
        sequence.pop_back();
      }
    }
  };
  expand(source.type, source.row, 0);

  // Zero-weight sequences (beta-excluded endpoints) are kept out of the bag.
  for (auto it = bag.weights.begin(); it != bag.weights.end();) {
    it = it->second == 0.0 ? bag.weights.erase(it) : std::next(it);
  }
  return bag;
}

int dense_sign(const SketchConfig& config, int coordinate, std::span<const int> sequence) {
  int sign = 1;
  for (std::size_t layer = 0; layer < sequence.size(); ++layer) {
    sign *= sign_from_key(derive_key(config.seed,
                                     {kDenseSignTag, static_cast<std::uint64_t>(coordinate),
                                      static_cast<std::uint64_t>(layer + 1),
                                      static_cast<std::uint64_t>(sequence[layer])}));
  }
  return sign;
}

int tensor_bucket(const SketchConfig& config, std::span<const int> sequence) {
  std::uint64_t bucket = 0;
  for (std::size_t layer = 0; layer < sequence.size(); ++layer) {
    bucket += bucket_from_key(derive_key(config.seed,
                                         {kTensorBucketTag,
                                          static_cast<std::uint64_t>(layer + 1),
                                          static_cast<std::uint64_t>(sequence[layer])}),
                              static_cast<std::uint32_t>(config.width));
  }
  return static_cast<int>(bucket % static_cast<std::uint64_t>(config.width));
}

int tensor_sign(const SketchConfig& config, std::span<const int> sequence) {
  int sign = 1;
  for (std::size_t layer = 0; layer < sequence.size(); ++layer) {
    sign *= sign_from_key(derive_key(config.seed,
                                     {kTensorSignTag, static_cast<std::uint64_t>(layer + 1),
                                      static_cast<std::uint64_t>(sequence[layer])}));
  }
  return sign;
}

PathFeatureMatrix dense_sketch(const RelGraph& graph, const SketchConfig& config,
                               std::span<const NodeRef> sources) {
  if (config.width < 1 || config.horizon < 1) {
    throw Error(ErrorCode::InvalidArgument, "sketch needs width >= 1 and horizon >= 1");
  }
  const std::vector<int> offsets = node_offsets(graph);
  const std::size_t n_total = static_cast<std::size_t>(offsets.back());
  const std::size_t d = static_cast<std::size_t>(config.width);

  // Per (layer, token) sign vectors, drawn counter-based so the stream is
  // independent of evaluation order.
  std::vector<std::vector<float>> signs(
      static_cast<std::size_t>(config.horizon) * graph.edge_types.size());
  for (int layer = 1; layer <= config.horizon; ++layer) {
    for (std::size_t t = 0; t < graph.edge_types.size(); ++t) {
      auto& vec = signs[static_cast<std::size_t>(layer - 1) * graph.edge_types.size() + t];
      vec.resize(d);
      for (std::size_t k = 0; k < d; ++k) {
        vec[k] = static_cast<float>(
            sign_from_key(derive_key(config.seed, {kDenseSignTag, k,
                                                   static_cast<std::uint64_t>(layer),
                                                   static_cast<std::uint64_t>(t)})));
      }
    }
  }

  PathFeatureMatrix out;
  out.sources.assign(sources.begin(), sources.end());
  out.width = config.width;
  out.config_fingerprint = config.fingerprint();
  out.rows.reserve(sources.size());

  std::vector<double> h_prev(n_total * d), h_next(n_total * d);
  for (const NodeRef& source : sources) {
    std::fill(h_prev.begin(), h_prev.end(), 0.0);
    const std::size_t s_global =
        static_cast<std::size_t>(offsets[static_cast<std::size_t>(source.type)] + source.row);
    for (std::size_t k = 0; k < d; ++k) h_prev[s_global * d + k] = 1.0;

    std::vector<double> z(d, 0.0);
    for (int layer = 1; layer <= config.horizon; ++layer) {
      std::fill(h_next.begin(), h_next.end(), 0.0);
      for (std::size_t t = 0; t < graph.edge_types.size(); ++t) {
        const EdgeType& et = graph.edge_types[t];
        const auto& sign =
            signs[static_cast<std::size_t>(layer - 1) * graph.edge_types.size() + t];
        const int src_off = offsets[static_cast<std::size_t>(et.src_type)];
        const int dst_off = offsets[static_cast<std::size_t>(et.dst_type)];
        const int n_src = graph.node_counts[static_cast<std::size_t>(et.src_type)];
        for (int u = 0; u < n_src; ++u) {
          const double* hu = &h_prev[static_cast<std::size_t>(src_off + u) * d];
          bool live = false;
          for (std::size_t k = 0; k < d; ++k) {
            if (hu[k] != 0.0) {
              live = true;
              break;
            }
          }
          if (!live) continue;
          for (int e = et.offsets[static_cast<std::size_t>(u)];
               e < et.offsets[static_cast<std::size_t>(u) + 1]; ++e) {
            const int v = et.neighbors[static_cast<std::size_t>(e)];
            double* hv = &h_next[static_cast<std::size_t>(dst_off + v) * d];
            for (std::size_t k = 0; k < d; ++k) {
              hv[k] += sign[k] * hu[k];
            }
          }
        }
      }
      const double a = config.length_weight(layer);
      for (std::size_t type = 0; type < graph.node_counts.size(); ++type) {
        const double beta = config.beta(static_cast<int>(type));
        if (beta == 0.0) continue;
        const std::size_t begin = static_cast<std::size_t>(offsets[type]) * d;
        const std::size_t end =
            begin + static_cast<std::size_t>(graph.node_counts[type]) * d;
        for (std::size_t idx = begin; idx < end; ++idx) {
          z[idx % d] += a * beta * h_next[idx];
        }
      }
      std::swap(h_prev, h_next);
    }
    out.rows.push_back(std::move(z));
  }
  return out;
}

PathFeatureMatrix tensor_sketch(const RelGraph& graph, const SketchConfig& config,
                                std::span<const NodeRef> sources) {
  if (config.width < 1 || config.horizon < 1) {
    throw Error(ErrorCode::InvalidArgument, "sketch needs width >= 1 and horizon >= 1");
  }
  const std::vector<int> offsets = node_offsets(graph);
  const std::size_t n_total = static_cast<std::size_t>(offsets.back());
  const std::size_t d = static_cast<std::size_t>(config.width);

  // Per (layer, token) bucket offset and sign.
  std::vector<int> bucket(static_cast<std::size_t>(config.horizon) * graph.edge_types.size());
  std::vector<int> sign(bucket.size());
  for (int layer = 1; layer <= config.horizon; ++layer) {
    for (std::size_t t = 0; t < graph.edge_types.size(); ++t) {
      const std::size_t idx =
          static_cast<std::size_t>(layer - 1) * graph.edge_types.size() + t;
      bucket[idx] = static_cast<int>(
          bucket_from_key(derive_key(config.seed, {kTensorBucketTag,
                                                   static_cast<std::uint64_t>(layer),
                                                   static_cast<std::uint64_t>(t)}),
                          static_cast<std::uint32_t>(config.width)));
      sign[idx] = sign_from_key(derive_key(config.seed,
                                           {kTensorSignTag, static_cast<std::uint64_t>(layer),
                                            static_cast<std::uint64_t>(t)}));
    }
  }

  PathFeatureMatrix out;
  out.sources.assign(sources.begin(), sources.end());
  out.width = config.width;
  out.config_fingerprint = config.fingerprint();
  out.rows.reserve(sources.size());

  std::vector<double> y_prev(n_total * d), y_next(n_total * d);
  for (const NodeRef& source : sources) {
    std::fill(y_prev.begin(), y_prev.end(), 0.0);
    const std::size_t s_global =
        static_cast<std::size_t>(offsets[static_cast<std::size_t>(source.type)] + source.row);
    y_prev[s_global * d + 0] = 1.0;  // empty prefix: bucket 0, sign +1

    std::vector<double> y(d, 0.0);
    for (int layer = 1; layer <= config.horizon; ++layer) {
      std::fill(y_next.begin(), y_next.end(), 0.0);
      for (std::size_t t = 0; t < graph.edge_types.size(); ++t) {
        const EdgeType& et = graph.edge_types[t];
        const std::size_t idx =
            static_cast<std::size_t>(layer - 1) * graph.edge_types.size() + t;
        const int b = bucket[idx];
        const double sg = sign[idx];
        const int src_off = offsets[static_cast<std::size_t>(et.src_type)];
        const int dst_off = offsets[static_cast<std::size_t>(et.dst_type)];
        const int n_src = graph.node_counts[static_cast<std::size_t>(et.src_type)];
        for (int u = 0; u < n_src; ++u) {
          const double* yu = &y_prev[static_cast<std::size_t>(src_off + u) * d];
          bool live = false;
          for (std::size_t j = 0; j < d; ++j) {
            if (yu[j] != 0.0) {
              live = true;
              break;
            }
          }
          if (!live) continue;
          for (int e = et.offsets[static_cast<std::size_t>(u)];
               e < et.offsets[static_cast<std::size_t>(u) + 1]; ++e) {
            const int v = et.neighbors[static_cast<std::size_t>(e)];
            double* yv = &y_next[static_cast<std::size_t>(dst_off + v) * d];
            for (std::size_t j = 0; j < d; ++j) {
              yv[(j + static_cast<std::size_t>(b)) % d] += sg * yu[j];
            }
          }
        }
      }
      const double a = config.length_weight(layer);
      for (std::size_t type = 0; type < graph.node_counts.size(); ++type) {
        const double beta = config.beta(static_cast<int>(type));
        if (beta == 0.0) continue;
        const std::size_t begin = static_cast<std::size_t>(offsets[type]) * d;
        const std::size_t end =
            begin + static_cast<std::size_t>(graph.node_counts[type]) * d;
        for (std::size_t idx = begin; idx < end; ++idx) {
          y[idx % d] += a * beta * y_next[idx];
        }
      }
      std::swap(y_prev, y_next);
    }
    out.rows.push_back(std::move(y));
  }
  return out;
}

double kernel_estimate(std::span<const double> z_a, std::span<const double> z_b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < z_a.size(); ++i) acc += z_a[i] * z_b[i];
  return acc / static_cast<double>(z_a.size());
}

}  // namespace relatron
