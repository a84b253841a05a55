#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relatron/rdb.hpp"

namespace relatron {

enum class EdgeOrigin { Fk, FkReverse, FkPair };

// One directed typed relation stored as CSR over source nodes. Every edge
// type has a reverse partner holding the transposed adjacency.
struct EdgeType {
  std::string name;
  int src_type = 0;
  int dst_type = 0;
  EdgeOrigin origin = EdgeOrigin::Fk;
  int reverse = -1;

  std::vector<int> offsets;    // size = node count of src_type + 1
  std::vector<int> neighbors;  // sorted within each source bucket

  std::size_t edge_count() const { return neighbors.size(); }
};

struct RelGraph {
  std::vector<std::string> node_type_names;  // one per table
  std::vector<int> node_counts;
  std::vector<EdgeType> edge_types;

  int node_type_index(const std::string& name) const;  // -1 when absent
  std::size_t total_nodes() const;
};

// One node per row per table; forward + reverse edge types per FK column.
// Null or dangling FK cells produce no edge.
RelGraph build_graph(const Database& db);

// Adds one relation (a forward/transpose pair of edge types) per unordered
// pair of distinct FK columns of each table, connecting the two referenced
// entities of every row where both FKs resolve.
RelGraph augment_fk_pairs(RelGraph graph, const Database& db);

// A self-looped metapath on the labeled type: a single F->F edge type or an
// ordered two-leg composition (F->X, X->F).
struct Metapath {
  int id = 0;
  std::vector<int> legs;
  std::string name;
};

// All single-leg and two-leg metapaths anchored at `labeled_type`, ordered
// deterministically by name.
std::vector<Metapath> enumerate_metapaths(const RelGraph& graph, int labeled_type);

// Projected entity-entity edge set for one metapath. Pairs are unordered
// (u < v), deduplicated, self-pairs excluded; weight counts distinct witness
// paths (for mutually-reverse legs each undirected witness is counted once).
struct ProjectedEdges {
  int metapath_id = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<double> weights;

  std::size_t edge_count() const { return edges.size(); }
};

ProjectedEdges project_metapath(const RelGraph& graph, const Metapath& metapath);

}  // namespace relatron
