#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relatron/graph.hpp"
#include "relatron/stats.hpp"
#include "relatron/task.hpp"

namespace relatron {

// Label kernel K(y_u, y_v): dot product for classification mean-label
// vectors, Pearson-style product of standardized values for regression.
struct LabelKernel {
  enum class Kind { Dot, Pearson };
  Kind kind = Kind::Dot;
  double mu = 0.0;
  double sigma2 = 1.0;

  static LabelKernel dot();
  // mu / sigma^2 estimated over the labeled nodes of the summary.
  static LabelKernel pearson_from_summary(const EntityLabelSummary& summary);
  static LabelKernel for_task(const TaskTable& task, const EntityLabelSummary& summary);

  double operator()(const std::vector<double>& a, const std::vector<double>& b) const;
};

struct HomophilyOptions {
  bool weighted = false;  // witness-weighted variant of the edge metric
};

// Mean kernel value over projected edges whose endpoints are both labeled.
// `skipped` (when given) receives the number of dropped edges.
double edge_homophily(const ProjectedEdges& edges, const EntityLabelSummary& summary,
                      const LabelKernel& kernel, std::size_t* skipped = nullptr,
                      const HomophilyOptions& options = {});

// Chance-corrected edge homophily using soft class degree mass
// D_k = sum over edges of (y_u_k + y_v_k). Classification only.
double adjusted_homophily(const ProjectedEdges& edges, const EntityLabelSummary& summary);

std::vector<double> class_prior(const EntityLabelSummary& summary);

// Mean positive part of per-class edge similarity above the prior,
// 1/(C-1) * sum_k [h_k - pi_k]_+. Regression falls back to edge_homophily.
double class_insensitive_homophily(const ProjectedEdges& edges,
                                   const EntityLabelSummary& summary,
                                   const std::vector<double>& prior,
                                   const LabelKernel& kernel);

// Mean kernel between each labeled node and the mean label of its labeled
// metapath neighbors.
double aggregation_homophily(const ProjectedEdges& edges, const EntityLabelSummary& summary,
                             const LabelKernel& kernel);

struct MetapathHomophily {
  int metapath_id = 0;
  std::string name;
  std::size_t edges_total = 0;
  std::size_t edges_used = 0;
  double h_edge = 0.0;
  std::optional<double> h_adj;  // classification only
  double h_ins = 0.0;
  double h_agg = 0.0;
};

struct HomophilyProfile {
  std::vector<MetapathHomophily> metapaths;
  SummaryStats edge_stats;
  SummaryStats adjusted_stats;  // regression: copies edge_stats (correlation family)
  SummaryStats insensitive_stats;
  SummaryStats aggregation_stats;
  std::vector<std::string> degenerate;  // "name: reason" for excluded metapaths
  std::size_t skipped_edges = 0;

  // Family whose aggregates feed the h_adjs_corr_* embedding slots:
  // adjusted homophily for classification, Pearson edge homophily for
  // regression.
  const SummaryStats& corr_family() const { return adjusted_stats; }
};

HomophilyProfile homophily_profile(const RelGraph& graph, const TaskTable& task,
                                   const EntityLabelSummary& summary,
                                   const HomophilyOptions& options = {});

}  // namespace relatron
