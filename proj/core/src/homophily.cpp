#include "relatron/homophily.hpp"

#include <cmath>

#include "relatron/error.hpp"

namespace relatron {

LabelKernel LabelKernel::dot() { return LabelKernel{Kind::Dot, 0.0, 1.0}; }

LabelKernel LabelKernel::pearson_from_summary(const EntityLabelSummary& summary) {
  std::vector<double> values;
  for (std::size_t e = 0; e < summary.mean.size(); ++e) {
    if (summary.count[e] > 0) values.push_back(summary.mean[e][0]);
  }
  const double mu = vec_mean(values);
  const double sigma2 = vec_variance(values);
  if (sigma2 <= 0.0) {
    throw Error(ErrorCode::DegenerateLabels, "zero label variance over labeled nodes");
  }
  return LabelKernel{Kind::Pearson, mu, sigma2};
}

LabelKernel LabelKernel::for_task(const TaskTable& task, const EntityLabelSummary& summary) {
  return task.target == TargetKind::Classification ? dot()
                                                   : pearson_from_summary(summary);
}

double LabelKernel::operator()(const std::vector<double>& a,
                               const std::vector<double>& b) const {
  if (kind == Kind::Dot) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }
  return (a[0] - mu) * (b[0] - mu) / sigma2;
}

double edge_homophily(const ProjectedEdges& edges, const EntityLabelSummary& summary,
                      const LabelKernel& kernel, std::size_t* skipped,
                      const HomophilyOptions& options) {
  double acc = 0.0;
  double norm = 0.0;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < edges.edges.size(); ++i) {
    const auto [u, v] = edges.edges[i];
    if (!summary.has(u) || !summary.has(v)) {
      ++dropped;
      continue;
    }
    const double w = options.weighted ? edges.weights[i] : 1.0;
    acc += w * kernel(summary.mean[static_cast<std::size_t>(u)],
                      summary.mean[static_cast<std::size_t>(v)]);
    norm += w;
  }
  if (skipped != nullptr) *skipped = dropped;
  if (norm <= 0.0) {
    throw Error(ErrorCode::NoLabeledEdges,
                "all " + std::to_string(edges.edges.size()) + " edges lack labels");
  }
  return acc / norm;
}

double adjusted_homophily(const ProjectedEdges& edges, const EntityLabelSummary& summary) {
  // Retained labeled edges only; D_k is the soft degree mass of class k and
  // sums to 2|E| because mean labels are probability vectors.
  std::size_t used = 0;
  std::vector<double> degree_mass(static_cast<std::size_t>(summary.dim), 0.0);
  double h_edge_sum = 0.0;
  const LabelKernel kernel = LabelKernel::dot();
  for (std::size_t i = 0; i < edges.edges.size(); ++i) {
    const auto [u, v] = edges.edges[i];
    if (!summary.has(u) || !summary.has(v)) continue;
    const auto& yu = summary.mean[static_cast<std::size_t>(u)];
    const auto& yv = summary.mean[static_cast<std::size_t>(v)];
    for (int k = 0; k < summary.dim; ++k) {
      degree_mass[static_cast<std::size_t>(k)] += yu[static_cast<std::size_t>(k)] +
                                                  yv[static_cast<std::size_t>(k)];
    }
    h_edge_sum += kernel(yu, yv);
    ++used;
  }
  if (used == 0) {
    throw Error(ErrorCode::NoLabeledEdges, "no labeled edges");
  }
  const double h_edge = h_edge_sum / static_cast<double>(used);
  double mass2 = 0.0;
  for (double dk : degree_mass) {
    const double frac = dk / (2.0 * static_cast<double>(used));
    mass2 += frac * frac;
  }
  const double denom = 1.0 - mass2;
  if (std::abs(denom) < 1e-12) {
    throw Error(ErrorCode::DegenerateClassMass, "single-class edge mass");
  }
  return (h_edge - mass2) / denom;
}

std::vector<double> class_prior(const EntityLabelSummary& summary) {
  std::vector<double> prior(static_cast<std::size_t>(summary.dim), 0.0);
  std::size_t labeled = 0;
  for (std::size_t e = 0; e < summary.mean.size(); ++e) {
    if (summary.count[e] == 0) continue;
    for (int k = 0; k < summary.dim; ++k) {
      prior[static_cast<std::size_t>(k)] += summary.mean[e][static_cast<std::size_t>(k)];
    }
    ++labeled;
  }
  if (labeled > 0) {
    for (double& p : prior) p /= static_cast<double>(labeled);
  }
  return prior;
}

double class_insensitive_homophily(const ProjectedEdges& edges,
                                   const EntityLabelSummary& summary,
                                   const std::vector<double>& prior,
                                   const LabelKernel& kernel) {
  if (kernel.kind == LabelKernel::Kind::Pearson) {
    return edge_homophily(edges, summary, kernel);
  }
  const int C = summary.dim;
  if (C < 2) {
    throw Error(ErrorCode::DegenerateClassMass, "classification needs >=2 classes");
  }
  // Sums run over both orientations of each retained edge so the metric is
  // direction-free; classes with zero edge mass are skipped.
  std::vector<double> numer(static_cast<std::size_t>(C), 0.0);
  std::vector<double> mass(static_cast<std::size_t>(C), 0.0);
  std::size_t used = 0;
  for (std::size_t i = 0; i < edges.edges.size(); ++i) {
    const auto [u, v] = edges.edges[i];
    if (!summary.has(u) || !summary.has(v)) continue;
    const auto& yu = summary.mean[static_cast<std::size_t>(u)];
    const auto& yv = summary.mean[static_cast<std::size_t>(v)];
    const double k_uv = kernel(yu, yv);
    for (int k = 0; k < C; ++k) {
      numer[static_cast<std::size_t>(k)] +=
          k_uv * (yu[static_cast<std::size_t>(k)] + yv[static_cast<std::size_t>(k)]);
      mass[static_cast<std::size_t>(k)] +=
          yu[static_cast<std::size_t>(k)] + yv[static_cast<std::size_t>(k)];
    }
    ++used;
  }
  if (used == 0) {
    throw Error(ErrorCode::NoLabeledEdges, "no labeled edges");
  }
  double acc = 0.0;
  for (int k = 0; k < C; ++k) {
    if (mass[static_cast<std::size_t>(k)] <= 0.0) continue;
    const double h_k =
        numer[static_cast<std::size_t>(k)] / mass[static_cast<std::size_t>(k)];
    const double excess = h_k - prior[static_cast<std::size_t>(k)];
    if (excess > 0.0) acc += excess;
  }
  return acc / static_cast<double>(C - 1);
}

double aggregation_homophily(const ProjectedEdges& edges, const EntityLabelSummary& summary,
                             const LabelKernel& kernel) {
  // Labeled-neighbor mean label per node with positive labeled degree.
  struct Accum {
    std::vector<double> sum;
    int deg = 0;
  };
  std::vector<Accum> accum(summary.mean.size());
  auto add = [&](int u, int v) {
    if (!summary.has(u) || !summary.has(v)) return;
    Accum& a = accum[static_cast<std::size_t>(u)];
    if (a.sum.empty()) a.sum.assign(static_cast<std::size_t>(summary.dim), 0.0);
    const auto& yv = summary.mean[static_cast<std::size_t>(v)];
    for (int k = 0; k < summary.dim; ++k) {
      a.sum[static_cast<std::size_t>(k)] += yv[static_cast<std::size_t>(k)];
    }
    ++a.deg;
  };
  for (const auto& [u, v] : edges.edges) {
    add(u, v);
    add(v, u);
  }
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t u = 0; u < accum.size(); ++u) {
    if (accum[u].deg == 0) continue;
    std::vector<double> mean = accum[u].sum;
    for (double& x : mean) x /= accum[u].deg;
    acc += kernel(summary.mean[u], mean);
    ++n;
  }
  if (n == 0) {
    throw Error(ErrorCode::NoLabeledEdges, "no node has labeled metapath neighbors");
  }
  return acc / static_cast<double>(n);
}

HomophilyProfile homophily_profile(const RelGraph& graph, const TaskTable& task,
                                   const EntityLabelSummary& summary,
                                   const HomophilyOptions& options) {
  const int labeled_type = graph.node_type_index(task.entity_table);
  if (labeled_type < 0) {
    throw Error(ErrorCode::UnknownNodeType, task.entity_table);
  }
  const bool classification = task.target == TargetKind::Classification;
  const LabelKernel kernel = LabelKernel::for_task(task, summary);
  const std::vector<double> prior = class_prior(summary);

  HomophilyProfile profile;
  std::vector<double> edge_vals, adj_vals, ins_vals, agg_vals, weights;
  for (const Metapath& metapath : enumerate_metapaths(graph, labeled_type)) {
    const ProjectedEdges edges = project_metapath(graph, metapath);
    if (edges.edges.empty()) {
      profile.degenerate.push_back(metapath.name + ": no projected edges");
      continue;
    }
    MetapathHomophily row;
    row.metapath_id = metapath.id;
    row.name = metapath.name;
    row.edges_total = edges.edges.size();
    try {
      std::size_t skipped = 0;
      row.h_edge = edge_homophily(edges, summary, kernel, &skipped, options);
      row.edges_used = edges.edges.size() - skipped;
      profile.skipped_edges += skipped;
      if (classification) {
        row.h_adj = adjusted_homophily(edges, summary);
      }
      row.h_ins = class_insensitive_homophily(edges, summary, prior, kernel);
      row.h_agg = aggregation_homophily(edges, summary, kernel);
    } catch (const Error& e) {
      profile.degenerate.push_back(metapath.name + ": " + e.what());
      continue;
    }
    edge_vals.push_back(row.h_edge);
    if (row.h_adj) adj_vals.push_back(*row.h_adj);
    ins_vals.push_back(row.h_ins);
    agg_vals.push_back(row.h_agg);
    weights.push_back(static_cast<double>(row.edges_used));
    profile.metapaths.push_back(std::move(row));
  }

  if (profile.metapaths.empty()) {
    throw Error(ErrorCode::EmptyProfile, "no usable metapath");
  }
  profile.edge_stats = summarize(edge_vals, weights);
  profile.insensitive_stats = summarize(ins_vals, weights);
  profile.aggregation_stats = summarize(agg_vals, weights);
  profile.adjusted_stats =
      classification ? summarize(adj_vals, weights) : profile.edge_stats;
  return profile;
}

}  // namespace relatron
