#include "relatron/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "relatron/error.hpp"
#include "relatron/metrics.hpp"
#include "relatron/rng.hpp"
#include "relatron/stats.hpp"
#include "relatron/version.hpp"

namespace relatron {

const std::vector<std::string>& FeatureRegistry::base_names() {
  static const std::vector<std::string> names = {
      "h_adjs_corr_mean",
      "h_adjs_corr_max",
      "h_adjs_corr_min",
      "h_adjs_corr_mode",
      "h_adjs_corr_weighted_mean",
      "lag1_autocorr_corr",
      "lag2_autocorr_corr",
      "mean_same_class_ratio_ignore",
      "adjusted_mean_same_class_ratio",
      "sparsity_ratio",
      "mean_past_task_nodes",
      "log_total_rows",
  };
  return names;
}

const std::vector<std::string>& FeatureRegistry::probe_names() {
  static const std::vector<std::string> names = {
      "rfr_randomnbfnet_1", "rfr_randomnbfnet_2", "rfr_randomnbfnet_3",
      "rfr_randomsage_1",   "rfr_randomsage_2",   "rfr_randomsage_3",
      "feat_affinity_1hop", "feat_affinity_2hop",
  };
  return names;
}

FeatureRegistry FeatureRegistry::make(bool with_probes, bool with_budget) {
  FeatureRegistry registry;
  registry.names = base_names();
  if (with_probes) {
    registry.names.insert(registry.names.end(), probe_names().begin(),
                          probe_names().end());
  }
  if (with_budget) registry.names.push_back("budget");
  return registry;
}

int FeatureRegistry::index(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<std::string> TaskEmbedding::missing_names() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i]) out.push_back(registry.names[i]);
  }
  return out;
}

ordered_json embedding_to_json(const TaskEmbedding& embedding) {
  ordered_json doc;
  doc["format_version"] = kFormatVersion;
  doc["registry_version"] = kRegistryVersion;
  doc["task"] = embedding.task;
  ordered_json features = ordered_json::object();
  for (std::size_t i = 0; i < embedding.values.size(); ++i) {
    if (embedding.values[i]) {
      features[embedding.registry.names[i]] = *embedding.values[i];
    } else {
      features[embedding.registry.names[i]] = nullptr;
    }
  }
  doc["features"] = std::move(features);
  doc["imputed"] = embedding.missing_names();
  return doc;
}

TaskEmbedding embedding_from_json(const json& doc) {
  check_format_version(doc, "embedding");
  if (doc.contains("registry_version") &&
      doc["registry_version"].get<int>() != kRegistryVersion) {
    throw Error(ErrorCode::FormatVersionMismatch,
                "embedding registry_version " +
                    std::to_string(doc["registry_version"].get<int>()));
  }
  TaskEmbedding out;
  out.task = doc.at("task").get<std::string>();
  for (const auto& [name, value] : doc.at("features").items()) {
    out.registry.names.push_back(name);
    if (value.is_null()) {
      out.values.push_back(std::nullopt);
    } else {
      out.values.push_back(value.get<double>());
    }
  }
  return out;
}

std::optional<double> temporal_autocorr(const TaskTable& task, int lag) {
  if (lag < 1) {
    throw Error(ErrorCode::InvalidArgument, "lag must be >= 1");
  }
  // Per entity, time-sorted train labels; pairs (label_t, label_{t-lag})
  // pooled across entities.
  std::map<int, std::vector<std::pair<std::int64_t, double>>> per_entity;
  for (const TaskRow& row : task.rows) {
    if (row.split != Split::Train) continue;
    per_entity[row.entity_row].emplace_back(row.timestamp, row.label);
  }
  std::vector<double> current, lagged;
  for (auto& [entity, rows] : per_entity) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = static_cast<std::size_t>(lag); i < rows.size(); ++i) {
      current.push_back(rows[i].second);
      lagged.push_back(rows[i - static_cast<std::size_t>(lag)].second);
    }
  }
  if (current.size() < 2) return std::nullopt;
  try {
    return pearson(current, lagged);
  } catch (const Error&) {
    return std::nullopt;
  }
}

WalkFeatures walk_features(const RelGraph& graph, const TaskTable& task,
                           const EntityLabelSummary& summary,
                           const WalkFeatureOptions& options) {
  if (options.walks < 1 || options.length < 1) {
    throw Error(ErrorCode::InvalidArgument, "walks and length must be >= 1");
  }
  const int entity_type = graph.node_type_index(task.entity_table);
  if (entity_type < 0) {
    throw Error(ErrorCode::UnknownNodeType, task.entity_table);
  }

  // First train timestamp per entity defines "past" relative to a seed row.
  std::vector<std::int64_t> first_ts(static_cast<std::size_t>(task.entity_count),
                                     std::numeric_limits<std::int64_t>::max());
  for (const TaskRow& row : task.rows) {
    if (row.split != Split::Train) continue;
    auto& slot = first_ts[static_cast<std::size_t>(row.entity_row)];
    slot = std::min(slot, row.timestamp);
  }

  const bool classification = task.target == TargetKind::Classification;
  const std::vector<double> prior = class_prior(summary);
  std::vector<int> entity_class(static_cast<std::size_t>(task.entity_count), -1);
  for (int e = 0; e < task.entity_count; ++e) {
    if (!summary.has(e)) continue;
    if (classification) {
      const auto& mean = summary.mean[static_cast<std::size_t>(e)];
      entity_class[static_cast<std::size_t>(e)] = static_cast<int>(
          std::max_element(mean.begin(), mean.end()) - mean.begin());
    } else {
      entity_class[static_cast<std::size_t>(e)] = 0;
    }
  }

  std::vector<std::size_t> seeds = task.split_rows(Split::Train);
  if (static_cast<int>(seeds.size()) > options.max_seeds) {
    // Uniform subsample without replacement, derived stream.
    Rng rng = Rng::from_key(options.seed, {0x90, seeds.size()});
    for (std::size_t i = 0; i < static_cast<std::size_t>(options.max_seeds); ++i) {
      const std::size_t j = i + rng.next_below(seeds.size() - i);
      std::swap(seeds[i], seeds[j]);
    }
    seeds.resize(static_cast<std::size_t>(options.max_seeds));
  }

  // Outgoing edge types per node type for uniform step sampling.
  std::vector<std::vector<const EdgeType*>> outgoing(graph.node_counts.size());
  for (const EdgeType& et : graph.edge_types) {
    outgoing[static_cast<std::size_t>(et.src_type)].push_back(&et);
  }

  long long walks_total = 0, walks_empty = 0;
  long long past_total = 0;
  double ratio_sum = 0.0, adjusted_sum = 0.0;
  long long seeds_with_past = 0;

  for (std::size_t seed_pos = 0; seed_pos < seeds.size(); ++seed_pos) {
    const TaskRow& seed_row = task.rows[seeds[seed_pos]];
    const int seed_class =
        classification ? static_cast<int>(seed_row.label) : 0;
    long long seed_past = 0, seed_same = 0;

    for (int w = 0; w < options.walks; ++w) {
      Rng rng = Rng::from_key(options.seed,
                              {0x91, static_cast<std::uint64_t>(seeds[seed_pos]),
                               static_cast<std::uint64_t>(w)});
      int type = entity_type;
      int row = seed_row.entity_row;
      std::set<int> visited_labeled;
      std::set<int> visited_past;
      long long same = 0;
      for (int step = 0; step < options.length; ++step) {
        long long degree = 0;
        for (const EdgeType* et : outgoing[static_cast<std::size_t>(type)]) {
          degree += et->offsets[static_cast<std::size_t>(row) + 1] -
                    et->offsets[static_cast<std::size_t>(row)];
        }
        if (degree == 0) break;
        long long pick = static_cast<long long>(rng.next_below(static_cast<std::uint64_t>(degree)));
        for (const EdgeType* et : outgoing[static_cast<std::size_t>(type)]) {
          const long long local = et->offsets[static_cast<std::size_t>(row) + 1] -
                                  et->offsets[static_cast<std::size_t>(row)];
          if (pick < local) {
            const int next =
                et->neighbors[static_cast<std::size_t>(et->offsets[static_cast<std::size_t>(row)] + pick)];
            type = et->dst_type;
            row = next;
            break;
          }
          pick -= local;
        }
        if (type == entity_type && summary.has(row)) {
          visited_labeled.insert(row);
          if (first_ts[static_cast<std::size_t>(row)] < seed_row.timestamp &&
              visited_past.insert(row).second) {
            if (classification &&
                entity_class[static_cast<std::size_t>(row)] == seed_class) {
              ++same;
            }
          }
        }
      }
      ++walks_total;
      if (visited_labeled.empty()) ++walks_empty;
      past_total += static_cast<long long>(visited_past.size());
      seed_past += static_cast<long long>(visited_past.size());
      seed_same += same;
    }

    if (classification && seed_past > 0) {
      const double ratio =
          static_cast<double>(seed_same) / static_cast<double>(seed_past);
      ratio_sum += ratio;
      adjusted_sum += ratio - prior[static_cast<std::size_t>(seed_class)];
      ++seeds_with_past;
    }
  }

  WalkFeatures out;
  out.sparsity_ratio = walks_total > 0
                           ? static_cast<double>(walks_empty) / static_cast<double>(walks_total)
                           : 1.0;
  out.mean_past_task_nodes =
      walks_total > 0 ? static_cast<double>(past_total) / static_cast<double>(walks_total)
                      : 0.0;
  if (seeds_with_past > 0) {
    out.mean_same_class_ratio_ignore = ratio_sum / static_cast<double>(seeds_with_past);
    out.adjusted_mean_same_class_ratio =
        adjusted_sum / static_cast<double>(seeds_with_past);
  }
  return out;
}

std::optional<double> entity_mean_heuristic(const TaskTable& task, std::string* diagnostic) {
  if (task.split_size(Split::Train) == 0 || task.split_size(Split::Val) == 0) {
    throw Error(ErrorCode::EmptySplit, "entity_mean_heuristic needs train and val");
  }
  std::map<int, std::pair<double, int>> by_entity;  // entity -> (sum, count)
  for (const TaskRow& row : task.rows) {
    if (row.split != Split::Train) continue;
    auto& acc = by_entity[row.entity_row];
    acc.first += row.label;
    acc.second += 1;
  }
  std::vector<double> predictions, labels;
  for (const TaskRow& row : task.rows) {
    if (row.split != Split::Val) continue;
    auto it = by_entity.find(row.entity_row);
    predictions.push_back(it == by_entity.end() ? 0.0 : it->second.first / it->second.second);
    labels.push_back(row.label);
  }
  try {
    return score_metric(task.metric.name, predictions, labels, task.metric.higher_is_better);
  } catch (const Error& e) {
    if (diagnostic != nullptr) *diagnostic = e.what();
    return std::nullopt;
  }
}

TaskEmbedding assemble_embedding(const std::string& task_name, const EmbeddingInputs& inputs,
                                 const FeatureRegistry& registry) {
  TaskEmbedding out;
  out.task = task_name;
  out.registry = registry;
  out.values.assign(registry.names.size(), std::nullopt);

  auto set = [&](const std::string& name, std::optional<double> value) {
    const int idx = registry.index(name);
    if (idx >= 0 && value) out.values[static_cast<std::size_t>(idx)] = *value;
  };

  if (inputs.profile != nullptr) {
    const SummaryStats& stats = inputs.profile->corr_family();
    set("h_adjs_corr_mean", stats.mean);
    set("h_adjs_corr_max", stats.max);
    set("h_adjs_corr_min", stats.min);
    set("h_adjs_corr_mode", stats.mode);
    set("h_adjs_corr_weighted_mean", stats.weighted_mean);
  }
  set("lag1_autocorr_corr", inputs.lag1);
  set("lag2_autocorr_corr", inputs.lag2);
  set("mean_same_class_ratio_ignore", inputs.walks.mean_same_class_ratio_ignore);
  set("adjusted_mean_same_class_ratio", inputs.walks.adjusted_mean_same_class_ratio);
  set("sparsity_ratio", inputs.walks.sparsity_ratio);
  set("mean_past_task_nodes", inputs.walks.mean_past_task_nodes);
  set("log_total_rows",
      std::log(1.0 + static_cast<double>(inputs.train_rows + inputs.val_rows)));
  for (const auto& [name, value] : inputs.probes) {
    set(name, value);
  }
  if (registry.has_budget()) {
    if (!inputs.budget) {
      throw Error(ErrorCode::RegistryMismatch, "registry expects a budget feature");
    }
    set("budget", inputs.budget);
  } else if (inputs.budget) {
    throw Error(ErrorCode::RegistryMismatch, "budget supplied to budget-free registry");
  }
  return out;
}

Normalizer Normalizer::fit(const std::vector<TaskEmbedding>& embeddings) {
  if (embeddings.empty()) {
    throw Error(ErrorCode::TooFewTasks, "cannot fit normalization on zero embeddings");
  }
  for (const TaskEmbedding& e : embeddings) {
    if (!(e.registry == embeddings.front().registry)) {
      throw Error(ErrorCode::RegistryMismatch, e.task + " uses a different registry");
    }
  }
  Normalizer out;
  out.registry_ = embeddings.front().registry;
  const std::size_t p = out.registry_.names.size();
  out.mean_.assign(p, 0.0);
  out.stddev_.assign(p, 1.0);

  for (std::size_t f = 0; f < p; ++f) {
    std::vector<double> present;
    for (const TaskEmbedding& e : embeddings) {
      if (e.values[f]) present.push_back(*e.values[f]);
    }
    const double impute = present.empty() ? 0.0 : vec_mean(present);
    // Mean/std over the impute-filled column so the bank is exactly
    // standardized after transform.
    std::vector<double> filled;
    filled.reserve(embeddings.size());
    for (const TaskEmbedding& e : embeddings) {
      filled.push_back(e.values[f] ? *e.values[f] : impute);
    }
    out.mean_[f] = vec_mean(filled);
    const double stddev = vec_std(filled);
    out.stddev_[f] = stddev > 1e-12 ? stddev : 1.0;
  }
  return out;
}

std::vector<double> Normalizer::transform(const TaskEmbedding& embedding,
                                          std::vector<std::string>* imputed) const {
  if (!(embedding.registry == registry_)) {
    throw Error(ErrorCode::RegistryMismatch, embedding.task + " uses a different registry");
  }
  std::vector<double> out(registry_.names.size(), 0.0);
  for (std::size_t f = 0; f < out.size(); ++f) {
    if (embedding.values[f]) {
      out[f] = (*embedding.values[f] - mean_[f]) / stddev_[f];
    } else {
      out[f] = 0.0;  // imputed to the bank mean
      if (imputed != nullptr) imputed->push_back(registry_.names[f]);
    }
  }
  return out;
}

}  // namespace relatron
