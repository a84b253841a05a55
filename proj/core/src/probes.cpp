#include "relatron/probes.hpp"

#include <cmath>

#include "relatron/error.hpp"
#include "relatron/metrics.hpp"
#include "relatron/rng.hpp"
#include "relatron/sketch.hpp"

namespace relatron {

namespace {

constexpr std::uint64_t kHashSlotTag = 0x61;
constexpr std::uint64_t kGaussTag = 0x62;

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

EncodedTable encode_features(const Database& db, const std::string& table, int hash_slots) {
  const TableSpec& spec = db.spec(table);
  const TableData& data = db.table(table);
  const std::size_t n = data.row_count;

  int width = 0;
  for (const ColumnSpec& col : spec.columns) {
    if (col.kind == ColumnKind::Numeric) width += 1;
    if (col.kind == ColumnKind::Categorical) width += hash_slots;
  }

  EncodedTable out;
  out.features = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), width);
  out.empty_warning = width == 0;

  int slot = 0;
  for (std::size_t ci = 0; ci < spec.columns.size(); ++ci) {
    const ColumnSpec& col = spec.columns[ci];
    if (col.kind == ColumnKind::Numeric) {
      const NumericColumn& values = data.numeric[ci];
      double sum = 0.0, sum2 = 0.0;
      std::size_t live = 0;
      for (std::size_t r = 0; r < n; ++r) {
        if (values.is_null[r]) continue;
        sum += values.values[r];
        sum2 += values.values[r] * values.values[r];
        ++live;
      }
      const double mean = live > 0 ? sum / static_cast<double>(live) : 0.0;
      const double var =
          live > 0 ? std::max(0.0, sum2 / static_cast<double>(live) - mean * mean) : 0.0;
      const double stddev = std::sqrt(var);
      if (stddev > 0.0) {
        for (std::size_t r = 0; r < n; ++r) {
          if (values.is_null[r]) continue;  // nulls stay 0 after scoring
          out.features(static_cast<Eigen::Index>(r), slot) =
              (values.values[r] - mean) / stddev;
        }
      }
      out.slot_names.push_back(col.name);
      slot += 1;
    } else if (col.kind == ColumnKind::Categorical) {
      const StringColumn& values = data.strings[ci];
      for (std::size_t r = 0; r < n; ++r) {
        if (values.is_null[r]) continue;
        const std::uint64_t key =
            derive_key(kHashSlotTag, {static_cast<std::uint64_t>(ci), fnv1a(values.values[r])});
        const int bucket =
            static_cast<int>(bucket_from_key(key, static_cast<std::uint32_t>(hash_slots)));
        out.features(static_cast<Eigen::Index>(r), slot + bucket) = 1.0;
      }
      for (int b = 0; b < hash_slots; ++b) {
        out.slot_names.push_back(col.name + "#" + std::to_string(b));
      }
      slot += hash_slots;
    }
  }
  return out;
}

std::vector<Eigen::MatrixXd> random_mp_hasher(const RelGraph& graph,
                                              const std::vector<Eigen::MatrixXd>& features,
                                              int layers, int width, std::uint64_t seed) {
  if (features.size() != graph.node_counts.size()) {
    throw Error(ErrorCode::InvalidArgument, "one feature matrix per node type expected");
  }
  std::vector<Eigen::MatrixXd> state = features;
  for (int layer = 1; layer <= layers; ++layer) {
    // Mean-aggregate incoming messages per edge type, concat with self, then
    // a frozen Gaussian projection scaled by 1/sqrt(fan_in) and a ramp.
    std::vector<Eigen::MatrixXd> next(state.size());
    for (std::size_t type = 0; type < graph.node_counts.size(); ++type) {
      const int n = graph.node_counts[type];
      std::vector<const EdgeType*> incoming;
      for (const EdgeType& et : graph.edge_types) {
        if (et.dst_type == static_cast<int>(type)) incoming.push_back(&et);
      }
      Eigen::Index concat_width = state[type].cols();
      for (const EdgeType* et : incoming) {
        concat_width += state[static_cast<std::size_t>(et->src_type)].cols();
      }
      Eigen::MatrixXd concat = Eigen::MatrixXd::Zero(n, concat_width);
      concat.leftCols(state[type].cols()) = state[type];

      Eigen::Index col = state[type].cols();
      for (const EdgeType* et : incoming) {
        const Eigen::MatrixXd& src = state[static_cast<std::size_t>(et->src_type)];
        Eigen::MatrixXd agg = Eigen::MatrixXd::Zero(n, src.cols());
        std::vector<int> degree(static_cast<std::size_t>(n), 0);
        const int n_src = graph.node_counts[static_cast<std::size_t>(et->src_type)];
        for (int u = 0; u < n_src; ++u) {
          for (int e = et->offsets[static_cast<std::size_t>(u)];
               e < et->offsets[static_cast<std::size_t>(u) + 1]; ++e) {
            const int v = et->neighbors[static_cast<std::size_t>(e)];
            agg.row(v) += src.row(u);
            ++degree[static_cast<std::size_t>(v)];
          }
        }
        for (int v = 0; v < n; ++v) {
          if (degree[static_cast<std::size_t>(v)] > 0) {
            agg.row(v) /= degree[static_cast<std::size_t>(v)];
          }
        }
        concat.middleCols(col, src.cols()) = agg;
        col += src.cols();
      }

      const double scale =
          concat_width > 0 ? 1.0 / std::sqrt(static_cast<double>(concat_width)) : 0.0;
      Eigen::MatrixXd projection(concat_width, width);
      for (Eigen::Index i = 0; i < concat_width; ++i) {
        for (Eigen::Index j = 0; j < width; ++j) {
          projection(i, j) =
              scale * Rng::from_key(seed, {kGaussTag, static_cast<std::uint64_t>(layer),
                                           static_cast<std::uint64_t>(type),
                                           static_cast<std::uint64_t>(i),
                                           static_cast<std::uint64_t>(j)})
                          .next_gaussian();
        }
      }
      next[type] = (concat * projection).cwiseMax(0.0);
    }
    state = std::move(next);
  }
  return state;
}

Eigen::VectorXd LinearHead::predict_rows(const Eigen::MatrixXd& X) const {
  return (X * weights).array() + intercept;
}

LinearHead fit_head(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                    LinearHead::Kind kind, double lambda, double shrinkage) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (n < 2) {
    throw Error(ErrorCode::SingularFit, "need >= 2 samples");
  }
  if (p == 0) {
    throw Error(ErrorCode::EmptyFeatures, "zero-width feature block");
  }

  LinearHead head;
  head.kind = kind;
  head.lambda = lambda;

  if (kind == LinearHead::Kind::Ridge) {
    const Eigen::RowVectorXd x_mean = X.colwise().mean();
    const double y_mean = y.mean();
    const Eigen::MatrixXd Xc = X.rowwise() - x_mean;
    const Eigen::VectorXd yc = y.array() - y_mean;
    Eigen::MatrixXd gram = Xc.transpose() * Xc;
    gram.diagonal().array() += lambda;
    Eigen::LDLT<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorCode::SingularFit, "ridge normal equations not SPD");
    }
    const Eigen::VectorXd rhs = Xc.transpose() * yc;
    head.weights = solver.solve(rhs);
    head.intercept = y_mean - x_mean.dot(head.weights);
    head.fit_residual = (gram * head.weights - rhs).norm();
    return head;
  }

  // LDA on binary labels.
  std::vector<Eigen::Index> idx0, idx1;
  for (Eigen::Index i = 0; i < n; ++i) {
    (y(i) > 0.5 ? idx1 : idx0).push_back(i);
  }
  if (idx0.empty() || idx1.empty()) {
    throw Error(ErrorCode::SingleClass, "LDA needs both classes");
  }
  Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(p), mu1 = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i : idx0) mu0 += X.row(i).transpose();
  for (Eigen::Index i : idx1) mu1 += X.row(i).transpose();
  mu0 /= static_cast<double>(idx0.size());
  mu1 /= static_cast<double>(idx1.size());

  Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index i : idx0) {
    const Eigen::VectorXd c = X.row(i).transpose() - mu0;
    pooled += c * c.transpose();
  }
  for (Eigen::Index i : idx1) {
    const Eigen::VectorXd c = X.row(i).transpose() - mu1;
    pooled += c * c.transpose();
  }
  if (n > 2) pooled /= static_cast<double>(n - 2);

  const double mean_diag = pooled.diagonal().mean();
  const double eps = shrinkage * (mean_diag > 0.0 ? mean_diag : 1.0);
  pooled.diagonal().array() += eps;

  Eigen::LDLT<Eigen::MatrixXd> solver(pooled);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularFit, "pooled covariance not SPD after shrinkage");
  }
  head.weights = solver.solve(mu1 - mu0);
  if (!head.weights.allFinite()) {
    throw Error(ErrorCode::SingularFit, "non-finite discriminant");
  }
  head.intercept = -0.5 * head.weights.dot(mu0 + mu1) +
                   std::log(static_cast<double>(idx1.size()) /
                            static_cast<double>(idx0.size()));
  return head;
}

namespace {

// One- and two-hop mean aggregates of raw encoded features, the training-free
// stand-in for a feature-quality probe.
Eigen::MatrixXd hop_features(const RelGraph& graph,
                             const std::vector<Eigen::MatrixXd>& raw, int target_type,
                             int hops) {
  std::vector<Eigen::MatrixXd> layer = raw;
  for (int h = 0; h < hops; ++h) {
    std::vector<Eigen::MatrixXd> next(layer.size());
    for (std::size_t type = 0; type < layer.size(); ++type) {
      const int n = graph.node_counts[type];
      std::vector<Eigen::MatrixXd> blocks;
      blocks.push_back(layer[type]);
      Eigen::Index width = layer[type].cols();
      for (const EdgeType& et : graph.edge_types) {
        if (et.src_type != static_cast<int>(type)) continue;
        const Eigen::MatrixXd& src = layer[static_cast<std::size_t>(et.dst_type)];
        Eigen::MatrixXd agg = Eigen::MatrixXd::Zero(n, src.cols());
        std::vector<int> degree(static_cast<std::size_t>(n), 0);
        for (int u = 0; u < n; ++u) {
          for (int e = et.offsets[static_cast<std::size_t>(u)];
               e < et.offsets[static_cast<std::size_t>(u) + 1]; ++e) {
            const int v = et.neighbors[static_cast<std::size_t>(e)];
            agg.row(u) += src.row(v);
            ++degree[static_cast<std::size_t>(u)];
          }
        }
        for (int u = 0; u < n; ++u) {
          if (degree[static_cast<std::size_t>(u)] > 0) {
            agg.row(u) /= degree[static_cast<std::size_t>(u)];
          }
        }
        blocks.push_back(std::move(agg));
        width += blocks.back().cols();
      }
      Eigen::MatrixXd concat(n, width);
      Eigen::Index col = 0;
      for (const Eigen::MatrixXd& b : blocks) {
        concat.middleCols(col, b.cols()) = b;
        col += b.cols();
      }
      next[type] = std::move(concat);
    }
    layer = std::move(next);
  }
  return layer[static_cast<std::size_t>(target_type)];
}

// Fits the task-appropriate head on train rows and scores the val split with
// the task metric.
double probe_score(const Eigen::MatrixXd& entity_features, const TaskTable& task,
                   double ridge_lambda) {
  const std::vector<std::size_t> train = task.split_rows(Split::Train);
  const std::vector<std::size_t> val = task.split_rows(Split::Val);
  if (train.empty() || val.empty()) {
    throw Error(ErrorCode::EmptySplit, "probe needs train and val rows");
  }
  const Eigen::Index p = entity_features.cols();
  Eigen::MatrixXd X(static_cast<Eigen::Index>(train.size()), p);
  Eigen::VectorXd y(static_cast<Eigen::Index>(train.size()));
  for (std::size_t i = 0; i < train.size(); ++i) {
    X.row(static_cast<Eigen::Index>(i)) = entity_features.row(task.rows[train[i]].entity_row);
    y(static_cast<Eigen::Index>(i)) = task.rows[train[i]].label;
  }

  const bool binary =
      task.target == TargetKind::Classification && task.num_classes == 2;
  const LinearHead head =
      fit_head(X, y, binary ? LinearHead::Kind::Lda : LinearHead::Kind::Ridge,
               ridge_lambda);

  std::vector<double> predictions, labels;
  predictions.reserve(val.size());
  labels.reserve(val.size());
  for (std::size_t row : val) {
    predictions.push_back(
        head.predict(entity_features.row(task.rows[row].entity_row).transpose()));
    labels.push_back(task.rows[row].label);
  }
  if (task.metric.name == "accuracy" && task.target == TargetKind::Classification) {
    // Ridge/LDA emit real scores; harden to class indices for accuracy.
    for (double& pred : predictions) {
      if (binary) {
        pred = pred > 0.0 ? 1.0 : 0.0;  // discriminant sign
      } else {
        pred = std::clamp(std::round(pred), 0.0,
                          static_cast<double>(task.num_classes - 1));
      }
    }
  }
  return score_metric(task.metric.name, predictions, labels, task.metric.higher_is_better);
}

}  // namespace

AffinityScores affinity_scores(const Database& db, const RelGraph& graph,
                               const TaskTable& task, const AffinityConfig& config) {
  if (task.split_size(Split::Val) == 0) {
    throw Error(ErrorCode::EmptySplit, "affinity needs a val split");
  }
  const int entity_type = graph.node_type_index(task.entity_table);
  if (entity_type < 0) {
    throw Error(ErrorCode::UnknownNodeType, task.entity_table);
  }

  AffinityScores out;
  auto run_probe = [&](const std::string& name, auto&& features_fn) {
    try {
      out.scores[name] = probe_score(features_fn(), task, config.ridge_lambda);
    } catch (const Error& e) {
      out.diagnostics.push_back(name + ": " + e.what());
    }
  };

  // Typed-path sketch probes.
  for (int horizon : config.sketch_horizons) {
    run_probe("rfr_randomnbfnet_" + std::to_string(horizon), [&]() {
      SketchConfig sketch;
      sketch.width = config.width;
      sketch.horizon = horizon;
      sketch.seed = derive_key(config.seed, {0x71, static_cast<std::uint64_t>(horizon)});
      std::vector<NodeRef> sources;
      sources.reserve(static_cast<std::size_t>(graph.node_counts[entity_type]));
      for (int row = 0; row < graph.node_counts[entity_type]; ++row) {
        sources.push_back({entity_type, row});
      }
      const PathFeatureMatrix mat = dense_sketch(graph, sketch, sources);
      Eigen::MatrixXd features(graph.node_counts[entity_type], config.width);
      for (std::size_t i = 0; i < mat.rows.size(); ++i) {
        for (int k = 0; k < config.width; ++k) {
          features(static_cast<Eigen::Index>(i), k) = mat.rows[i][static_cast<std::size_t>(k)];
        }
      }
      return features;
    });
  }

  // Frozen message-passing probes and raw-feature hops share the encodings.
  std::vector<Eigen::MatrixXd> raw(graph.node_counts.size());
  bool encoded = true;
  try {
    for (std::size_t type = 0; type < graph.node_counts.size(); ++type) {
      raw[type] = encode_features(db, graph.node_type_names[type], config.hash_slots).features;
    }
  } catch (const Error& e) {
    encoded = false;
    out.diagnostics.push_back(std::string("encode_features: ") + e.what());
  }
  if (encoded) {
    for (int layers : config.hasher_layers) {
      run_probe("rfr_randomsage_" + std::to_string(layers), [&]() {
        const auto state = random_mp_hasher(
            graph, raw, layers, config.width,
            derive_key(config.seed, {0x72, static_cast<std::uint64_t>(layers)}));
        return state[static_cast<std::size_t>(entity_type)];
      });
    }
    run_probe("feat_affinity_1hop",
              [&]() { return hop_features(graph, raw, entity_type, 1); });
    run_probe("feat_affinity_2hop",
              [&]() { return hop_features(graph, raw, entity_type, 2); });
  }
  return out;
}

}  // namespace relatron
