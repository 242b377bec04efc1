#include "ccrm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace ccrm {

Eigen::VectorXi SparseGraph::degrees() const {
  Eigen::VectorXi deg = Eigen::VectorXi::Zero(n_nodes);
  for (const auto& [i, j] : edges) {
    if (i == j) {
      deg[i] += 2;
    } else {
      deg[i] += 1;
      deg[j] += 1;
    }
  }
  return deg;
}

std::vector<std::vector<int>> SparseGraph::adjacency(bool include_self) const {
  std::vector<std::vector<int>> adj(n_nodes);
  for (const auto& [i, j] : edges) {
    if (i == j) {
      if (include_self) adj[i].push_back(i);
      continue;
    }
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

void SparseGraph::validate() const {
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < i || j >= n_nodes) {
      throw std::invalid_argument("SparseGraph: edge endpoint out of range");
    }
  }
  for (std::size_t e = 1; e < edges.size(); ++e) {
    if (!(edges[e - 1] < edges[e])) {
      throw std::invalid_argument("SparseGraph: edges must be sorted unique");
    }
  }
  if (!labels.empty() && static_cast<int>(labels.size()) != n_nodes) {
    throw std::invalid_argument("SparseGraph: label table size mismatch");
  }
}

long MultiCounts::total() const {
  long t = 0;
  for (const auto& [key, n] : counts) t += n;
  return t;
}

double link_probability(const Eigen::VectorXd& wi, const Eigen::VectorXd& wj,
                        bool self_loop) {
  const double rate = self_loop ? wi.dot(wi) : 2.0 * wi.dot(wj);
  return -std::expm1(-rate);
}

MultiCounts generate_multigraph(const NodeAtoms& atoms, Rng& rng) {
  MultiCounts counts;
  counts.n_nodes = static_cast<int>(atoms.size());
  counts.p = static_cast<int>(atoms.beta.cols());
  if (atoms.size() == 0) return counts;

  const Eigen::MatrixXd w = atoms.weights();
  for (int k = 0; k < counts.p; ++k) {
    const double total_mass = w.col(k).sum();
    if (!(total_mass > 0.0)) continue;
    const long n_events = poisson(total_mass * total_mass, rng);
    if (n_events == 0) continue;
    std::discrete_distribution<int> endpoint(w.col(k).data(),
                                             w.col(k).data() + w.rows());
    for (long e = 0; e < n_events; ++e) {
      const int i = endpoint(rng);
      const int j = endpoint(rng);
      counts.add(i, j, k);
    }
  }
  return counts;
}

SparseGraph collapse_to_simple(const MultiCounts& counts, int n_nodes) {
  SparseGraph graph;
  graph.n_nodes = n_nodes;
  std::set<std::pair<int, int>> edge_set;
  for (const auto& [key, n] : counts.counts) {
    if (n <= 0) continue;
    int i, j, k;
    MultiCounts::unkey(key, i, j, k);
    if (i >= n_nodes || j >= n_nodes) {
      throw std::invalid_argument("collapse_to_simple: endpoint out of range");
    }
    edge_set.insert({std::min(i, j), std::max(i, j)});
  }
  graph.edges.assign(edge_set.begin(), edge_set.end());
  return graph;
}

double default_generation_epsilon(const CcrmParams& params) {
  return params.base.infinite_activity() ? 1e-6 : 0.0;
}

GraphDraw generate_graph(const CcrmParams& params, double alpha,
                         double epsilon, std::uint64_t seed) {
  GraphDraw draw;
  if (alpha == 0.0) {
    draw.atoms.w0.resize(0);
    draw.atoms.beta.resize(0, params.p);
    return draw;
  }
  Rng rng = make_rng(seed);
  draw.atoms = sample_ccrm_atoms(params, alpha, epsilon,
                                 Eigen::VectorXd::Zero(params.p), rng);
  draw.counts = generate_multigraph(draw.atoms, rng);
  draw.graph = collapse_to_simple(draw.counts,
                                  static_cast<int>(draw.atoms.size()));
  return draw;
}

std::pair<SparseGraph, std::vector<int>> connected_subgraph(
    const SparseGraph& graph) {
  std::vector<char> connected(graph.n_nodes, 0);
  for (const auto& [i, j] : graph.edges) {
    connected[i] = 1;
    connected[j] = 1;
  }
  std::vector<int> keep;
  std::vector<int> new_id(graph.n_nodes, -1);
  for (int v = 0; v < graph.n_nodes; ++v) {
    if (connected[v]) {
      new_id[v] = static_cast<int>(keep.size());
      keep.push_back(v);
    }
  }
  SparseGraph out;
  out.n_nodes = static_cast<int>(keep.size());
  out.edges.reserve(graph.edges.size());
  for (const auto& [i, j] : graph.edges) {
    out.edges.emplace_back(new_id[i], new_id[j]);
  }
  std::sort(out.edges.begin(), out.edges.end());
  if (!graph.labels.empty()) {
    out.labels.reserve(keep.size());
    for (int v : keep) out.labels.push_back(graph.labels[v]);
  }
  return {std::move(out), std::move(keep)};
}

BipartiteDraw generate_bipartite(const CcrmParams& row_params,
                                 const CcrmParams& col_params, double alpha,
                                 double alpha_prime, double epsilon,
                                 std::uint64_t seed) {
  if (row_params.p != col_params.p) {
    throw std::invalid_argument("generate_bipartite: sides must share p");
  }
  BipartiteDraw draw;
  Rng rng = make_rng(seed);
  const Eigen::VectorXd no_tilt = Eigen::VectorXd::Zero(row_params.p);
  if (alpha > 0.0) {
    draw.row_atoms = sample_ccrm_atoms(row_params, alpha, epsilon, no_tilt, rng);
  } else {
    draw.row_atoms.beta.resize(0, row_params.p);
  }
  if (alpha_prime > 0.0) {
    draw.col_atoms =
        sample_ccrm_atoms(col_params, alpha_prime, epsilon, no_tilt, rng);
  } else {
    draw.col_atoms.beta.resize(0, col_params.p);
  }
  draw.graph.n_rows = static_cast<int>(draw.row_atoms.size());
  draw.graph.n_cols = static_cast<int>(draw.col_atoms.size());
  if (draw.graph.n_rows == 0 || draw.graph.n_cols == 0) return draw;

  const Eigen::MatrixXd w = draw.row_atoms.weights();
  const Eigen::MatrixXd wp = draw.col_atoms.weights();
  std::set<std::pair<int, int>> edge_set;
  for (int k = 0; k < row_params.p; ++k) {
    const double mass = w.col(k).sum() * wp.col(k).sum();
    if (!(mass > 0.0)) continue;
    const long n_events = poisson(mass, rng);
    if (n_events == 0) continue;
    std::discrete_distribution<int> row_pick(w.col(k).data(),
                                             w.col(k).data() + w.rows());
    std::discrete_distribution<int> col_pick(wp.col(k).data(),
                                             wp.col(k).data() + wp.rows());
    for (long e = 0; e < n_events; ++e) {
      edge_set.insert({row_pick(rng), col_pick(rng)});
    }
  }
  draw.graph.edges.assign(edge_set.begin(), edge_set.end());
  return draw;
}

}  // namespace ccrm
