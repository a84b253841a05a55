#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relatron/graph.hpp"
#include "relatron/homophily.hpp"
#include "relatron/io.hpp"
#include "relatron/task.hpp"

namespace relatron {

// Ordered, versioned list of task-feature names. Embeddings are only
// comparable under the same registry.
struct FeatureRegistry {
  std::vector<std::string> names;

  static const std::vector<std::string>& base_names();   // the 12 model-free features
  static const std::vector<std::string>& probe_names();  // rfr_* / feat_affinity_*
  static FeatureRegistry make(bool with_probes = false, bool with_budget = false);

  int index(const std::string& name) const;  // -1 when absent
  bool has_budget() const { return index("budget") >= 0; }
  bool operator==(const FeatureRegistry& other) const { return names == other.names; }
};

struct TaskEmbedding {
  std::string task;
  FeatureRegistry registry;
  std::vector<std::optional<double>> values;  // missing slots imputed bank-side

  std::vector<std::string> missing_names() const;
};

ordered_json embedding_to_json(const TaskEmbedding& embedding);
TaskEmbedding embedding_from_json(const json& doc);

// Pooled lag correlation of per-entity time-sorted train labels; missing when
// fewer than two pooled pairs exist or either side is constant.
std::optional<double> temporal_autocorr(const TaskTable& task, int lag);

struct WalkFeatureOptions {
  int walks = 20;        // W per seed row
  int length = 4;        // steps per walk
  int max_seeds = 2000;  // uniform subsample cap over train rows
  std::uint64_t seed = 0;
};

struct WalkFeatures {
  std::optional<double> mean_same_class_ratio_ignore;
  std::optional<double> adjusted_mean_same_class_ratio;
  double sparsity_ratio = 1.0;      // fraction of walks visiting no labeled entity
  double mean_past_task_nodes = 0.0;
};

// Uniform random walks over the augmented graph from labeled train rows.
// "Past" means a strictly earlier first train timestamp than the seed row.
WalkFeatures walk_features(const RelGraph& graph, const TaskTable& task,
                           const EntityLabelSummary& summary,
                           const WalkFeatureOptions& options = {});

// Per-entity train-mean prediction scored on the val split; unseen entities
// predict 0. Missing on metric degeneracy (e.g. one-class val AUROC).
std::optional<double> entity_mean_heuristic(const TaskTable& task,
                                            std::string* diagnostic = nullptr);

struct EmbeddingInputs {
  const HomophilyProfile* profile = nullptr;  // null = slots missing
  std::optional<double> lag1;
  std::optional<double> lag2;
  WalkFeatures walks;
  std::size_t train_rows = 0;
  std::size_t val_rows = 0;
  std::map<std::string, double> probes;  // by registry probe name
  std::optional<double> budget;
};

TaskEmbedding assemble_embedding(const std::string& task_name, const EmbeddingInputs& inputs,
                                 const FeatureRegistry& registry);

// Per-feature standardization fitted on a bank of embeddings. Missing values
// impute to the feature mean (hence exactly 0 after scaling) and are flagged.
class Normalizer {
 public:
  static Normalizer fit(const std::vector<TaskEmbedding>& embeddings);

  std::vector<double> transform(const TaskEmbedding& embedding,
                                std::vector<std::string>* imputed = nullptr) const;

  const FeatureRegistry& registry() const { return registry_; }
  const std::vector<double>& means() const { return mean_; }
  const std::vector<double>& stddevs() const { return stddev_; }

 private:
  FeatureRegistry registry_;
  std::vector<double> mean_;
  std::vector<double> stddev_;
};

}  // namespace relatron
