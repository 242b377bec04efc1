#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ccrm/atoms.hpp"
#include "ccrm/params.hpp"
#include "ccrm/rng.hpp"

namespace ccrm {

/// Undirected simple graph over dense node ids; self-loops allowed; edges
/// stored once as (i, j) with i <= j, sorted and unique.
struct SparseGraph {
  int n_nodes = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::string> labels;  // empty, or one label per node

  int n_edges() const { return static_cast<int>(edges.size()); }

  /// Degrees; a self-loop contributes 2.
  Eigen::VectorXi degrees() const;

  /// Neighbor lists (self excluded unless include_self).
  std::vector<std::vector<int>> adjacency(bool include_self = false) const;

  void validate() const;
};

/// Sparse directed multigraph counts keyed by (source, target, community).
struct MultiCounts {
  int n_nodes = 0;
  int p = 0;
  std::unordered_map<std::uint64_t, int> counts;

  static std::uint64_t key(int i, int j, int k) {
    return (static_cast<std::uint64_t>(i) << 40) |
           (static_cast<std::uint64_t>(j) << 16) |
           static_cast<std::uint64_t>(k);
  }
  static void unkey(std::uint64_t key, int& i, int& j, int& k) {
    i = static_cast<int>(key >> 40);
    j = static_cast<int>((key >> 16) & 0xffffff);
    k = static_cast<int>(key & 0xffff);
  }

  void add(int i, int j, int k, int n = 1) { counts[key(i, j, k)] += n; }
  int at(int i, int j, int k) const {
    auto it = counts.find(key(i, j, k));
    return it == counts.end() ? 0 : it->second;
  }
  long total() const;
};

struct BipartiteGraph {
  int n_rows = 0;
  int n_cols = 0;
  std::vector<std::pair<int, int>> edges;  // (row, col), sorted, unique

  int n_edges() const { return static_cast<int>(edges.size()); }
};

/// 1 - exp(-2 sum_k w_ik w_jk) for distinct nodes; the self-loop rate drops
/// the factor 2.
double link_probability(const Eigen::VectorXd& wi, const Eigen::VectorXd& wj,
                        bool self_loop);

/// Community-wise totals then independent endpoint draws: community k places
/// Poisson((sum_i w_ik)^2) directed edges with both endpoints drawn
/// proportionally to the weights, so each ordered pair receives
/// Poisson(w_ik w_jk) counts.
MultiCounts generate_multigraph(const NodeAtoms& atoms, Rng& rng);

/// Edge {i,j} present iff any community carries a count in either direction.
SparseGraph collapse_to_simple(const MultiCounts& counts, int n_nodes);

struct GraphDraw {
  SparseGraph graph;  // over all atoms, isolated ones included
  NodeAtoms atoms;
  MultiCounts counts;
};

/// Full pipeline: atoms -> multigraph -> simple graph, deterministic per seed.
GraphDraw generate_graph(const CcrmParams& params, double alpha,
                         double epsilon, std::uint64_t seed);

/// Truncation default for graph generation: 0 for finite-activity parameters,
/// 1e-6 otherwise.
double default_generation_epsilon(const CcrmParams& params);

/// Restriction to nodes with at least one connection (self-loops count);
/// returns the relabeled graph and the original index of each kept node.
std::pair<SparseGraph, std::vector<int>> connected_subgraph(
    const SparseGraph& graph);

struct BipartiteDraw {
  BipartiteGraph graph;
  NodeAtoms row_atoms;
  NodeAtoms col_atoms;
};

/// Bipartite pipeline; community k places Poisson(W_k * W'_k) directed edges
/// row->col (note: no factor 2).
BipartiteDraw generate_bipartite(const CcrmParams& row_params,
                                 const CcrmParams& col_params, double alpha,
                                 double alpha_prime, double epsilon,
                                 std::uint64_t seed);

}  // namespace ccrm
