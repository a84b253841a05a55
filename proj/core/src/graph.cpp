#include "relatron/graph.hpp"

#include <algorithm>
#include <map>

#include "relatron/error.hpp"

namespace relatron {

namespace {

void fill_csr(EdgeType& type, int n_src, const std::vector<std::pair<int, int>>& edges) {
  type.offsets.assign(static_cast<std::size_t>(n_src) + 1, 0);
  for (const auto& [u, v] : edges) {
    ++type.offsets[static_cast<std::size_t>(u) + 1];
  }
  for (std::size_t i = 1; i < type.offsets.size(); ++i) {
    type.offsets[i] += type.offsets[i - 1];
  }
  type.neighbors.resize(edges.size());
  std::vector<int> cursor(type.offsets.begin(), type.offsets.end() - 1);
  for (const auto& [u, v] : edges) {
    type.neighbors[static_cast<std::size_t>(cursor[static_cast<std::size_t>(u)]++)] = v;
  }
  for (int u = 0; u < n_src; ++u) {
    std::sort(type.neighbors.begin() + type.offsets[static_cast<std::size_t>(u)],
              type.neighbors.begin() + type.offsets[static_cast<std::size_t>(u) + 1]);
  }
}

// Adds a forward/transpose pair of edge types built from directed (src,dst)
// row pairs; returns the forward type index.
int add_relation(RelGraph& graph, const std::string& fwd_name, const std::string& rev_name,
                 int src_type, int dst_type, EdgeOrigin fwd_origin, EdgeOrigin rev_origin,
                 const std::vector<std::pair<int, int>>& edges) {
  EdgeType fwd;
  fwd.name = fwd_name;
  fwd.src_type = src_type;
  fwd.dst_type = dst_type;
  fwd.origin = fwd_origin;
  fill_csr(fwd, graph.node_counts[static_cast<std::size_t>(src_type)], edges);

  std::vector<std::pair<int, int>> transposed;
  transposed.reserve(edges.size());
  for (const auto& [u, v] : edges) transposed.emplace_back(v, u);

  EdgeType rev;
  rev.name = rev_name;
  rev.src_type = dst_type;
  rev.dst_type = src_type;
  rev.origin = rev_origin;
  fill_csr(rev, graph.node_counts[static_cast<std::size_t>(dst_type)], transposed);

  const int fwd_id = static_cast<int>(graph.edge_types.size());
  fwd.reverse = fwd_id + 1;
  rev.reverse = fwd_id;
  graph.edge_types.push_back(std::move(fwd));
  graph.edge_types.push_back(std::move(rev));
  return fwd_id;
}

}  // namespace

int RelGraph::node_type_index(const std::string& name) const {
  for (std::size_t i = 0; i < node_type_names.size(); ++i) {
    if (node_type_names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::size_t RelGraph::total_nodes() const {
  std::size_t n = 0;
  for (int c : node_counts) n += static_cast<std::size_t>(c);
  return n;
}

RelGraph build_graph(const Database& db) {
  RelGraph graph;
  for (std::size_t ti = 0; ti < db.schema.tables.size(); ++ti) {
    graph.node_type_names.push_back(db.schema.tables[ti].name);
    graph.node_counts.push_back(static_cast<int>(db.tables[ti].row_count));
  }
  for (std::size_t ti = 0; ti < db.schema.tables.size(); ++ti) {
    const TableSpec& spec = db.schema.tables[ti];
    const TableData& data = db.tables[ti];
    for (std::size_t fi = 0; fi < spec.foreign_keys.size(); ++fi) {
      const ForeignKeySpec& fk = spec.foreign_keys[fi];
      const int ref_ti = db.schema.table_index(fk.references_table);
      std::vector<std::pair<int, int>> edges;
      for (std::size_t r = 0; r < data.row_count; ++r) {
        const int target = data.fk_rows[fi][r];
        if (target >= 0) edges.emplace_back(static_cast<int>(r), target);
      }
      add_relation(graph, spec.name + "." + fk.column + "->" + fk.references_table,
                   fk.references_table + "<-" + spec.name + "." + fk.column,
                   static_cast<int>(ti), ref_ti, EdgeOrigin::Fk, EdgeOrigin::FkReverse,
                   edges);
    }
  }
  return graph;
}

RelGraph augment_fk_pairs(RelGraph graph, const Database& db) {
  for (std::size_t ti = 0; ti < db.schema.tables.size(); ++ti) {
    const TableSpec& spec = db.schema.tables[ti];
    const TableData& data = db.tables[ti];
    for (std::size_t a = 0; a < spec.foreign_keys.size(); ++a) {
      for (std::size_t b = a + 1; b < spec.foreign_keys.size(); ++b) {
        const int ta = db.schema.table_index(spec.foreign_keys[a].references_table);
        const int tb = db.schema.table_index(spec.foreign_keys[b].references_table);
        std::vector<std::pair<int, int>> edges;
        for (std::size_t r = 0; r < data.row_count; ++r) {
          const int ra = data.fk_rows[a][r];
          const int rb = data.fk_rows[b][r];
          if (ra >= 0 && rb >= 0) edges.emplace_back(ra, rb);
        }
        add_relation(graph,
                     spec.name + "." + spec.foreign_keys[a].column + "~" +
                         spec.foreign_keys[b].column,
                     spec.name + "." + spec.foreign_keys[b].column + "~" +
                         spec.foreign_keys[a].column,
                     ta, tb, EdgeOrigin::FkPair, EdgeOrigin::FkPair, edges);
      }
    }
  }
  return graph;
}

std::vector<Metapath> enumerate_metapaths(const RelGraph& graph, int labeled_type) {
  if (labeled_type < 0 || labeled_type >= static_cast<int>(graph.node_type_names.size())) {
    throw Error(ErrorCode::UnknownNodeType, "labeled type " + std::to_string(labeled_type));
  }
  std::vector<Metapath> out;
  for (std::size_t t = 0; t < graph.edge_types.size(); ++t) {
    const EdgeType& et = graph.edge_types[t];
    if (et.src_type == labeled_type && et.dst_type == labeled_type) {
      Metapath m;
      m.legs = {static_cast<int>(t)};
      m.name = et.name;
      out.push_back(std::move(m));
    }
  }
  for (std::size_t t1 = 0; t1 < graph.edge_types.size(); ++t1) {
    const EdgeType& e1 = graph.edge_types[t1];
    if (e1.src_type != labeled_type) continue;
    for (std::size_t t2 = 0; t2 < graph.edge_types.size(); ++t2) {
      const EdgeType& e2 = graph.edge_types[t2];
      if (e2.src_type != e1.dst_type || e2.dst_type != labeled_type) continue;
      Metapath m;
      m.legs = {static_cast<int>(t1), static_cast<int>(t2)};
      m.name = e1.name + " | " + e2.name;
      out.push_back(std::move(m));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Metapath& a, const Metapath& b) { return a.name < b.name; });
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].id = static_cast<int>(i);
  }
  return out;
}

ProjectedEdges project_metapath(const RelGraph& graph, const Metapath& metapath) {
  for (int leg : metapath.legs) {
    if (leg < 0 || leg >= static_cast<int>(graph.edge_types.size())) {
      throw Error(ErrorCode::UnknownEdgeType, metapath.name);
    }
  }

  // Directed witness counts keyed on (u, v).
  std::map<std::pair<int, int>, double> directed;
  if (metapath.legs.size() == 1) {
    const EdgeType& et = graph.edge_types[static_cast<std::size_t>(metapath.legs[0])];
    const int n = graph.node_counts[static_cast<std::size_t>(et.src_type)];
    for (int u = 0; u < n; ++u) {
      for (int k = et.offsets[static_cast<std::size_t>(u)];
           k < et.offsets[static_cast<std::size_t>(u) + 1]; ++k) {
        const int v = et.neighbors[static_cast<std::size_t>(k)];
        if (u != v) directed[{u, v}] += 1.0;
      }
    }
  } else {
    const EdgeType& e1 = graph.edge_types[static_cast<std::size_t>(metapath.legs[0])];
    const EdgeType& e2 = graph.edge_types[static_cast<std::size_t>(metapath.legs[1])];
    const int n = graph.node_counts[static_cast<std::size_t>(e1.src_type)];
    for (int u = 0; u < n; ++u) {
      for (int k = e1.offsets[static_cast<std::size_t>(u)];
           k < e1.offsets[static_cast<std::size_t>(u) + 1]; ++k) {
        const int x = e1.neighbors[static_cast<std::size_t>(k)];
        for (int l = e2.offsets[static_cast<std::size_t>(x)];
             l < e2.offsets[static_cast<std::size_t>(x) + 1]; ++l) {
          const int v = e2.neighbors[static_cast<std::size_t>(l)];
          if (u != v) directed[{u, v}] += 1.0;
        }
      }
    }
  }

  // For mutually-reverse legs a u->x->v witness and its v->x->u mirror are the
  // same undirected path, so the directed counts are already symmetric and are
  // taken as-is; otherwise the two directions count distinct witnesses.
  const bool mirror_counted_once =
      metapath.legs.size() == 2 &&
      graph.edge_types[static_cast<std::size_t>(metapath.legs[0])].reverse == metapath.legs[1];

  std::map<std::pair<int, int>, double> undirected;
  for (const auto& [key, count] : directed) {
    const auto [u, v] = key;
    const std::pair<int, int> canon = u < v ? key : std::pair<int, int>{v, u};
    if (mirror_counted_once) {
      undirected[canon] = count;  // both orientations carry the same value
    } else {
      undirected[canon] += count;
    }
  }

  ProjectedEdges out;
  out.metapath_id = metapath.id;
  out.edges.reserve(undirected.size());
  out.weights.reserve(undirected.size());
  for (const auto& [key, weight] : undirected) {
    out.edges.push_back(key);
    out.weights.push_back(weight);
  }
  return out;
}

}  // namespace relatron
