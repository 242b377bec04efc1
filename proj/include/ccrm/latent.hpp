#pragma once

#include <Eigen/Dense>

#include "ccrm/graph.hpp"
#include "ccrm/rng.hpp"

namespace ccrm {

/// Augmented per-edge community counts and their node sufficient statistics.
/// Row e of ntilde is aligned with graph.edges[e] (i <= j) and holds the
/// combined count of both directions; self-loop rows are even by
/// construction. m(i,k) sums a node's counts over incident edges with the
/// diagonal counted once as stored; m_row(i) sums m(i,.) over communities.
struct LatentCounts {
  Eigen::MatrixXi ntilde;  // n_edges x p
  Eigen::MatrixXd m;       // n_nodes x p
  Eigen::VectorXd m_row;   // n_nodes
};

/// Multivariate Poisson conditioned on a positive total: the total is
/// zero-truncated Poisson(sum rates), split multinomially.
Eigen::VectorXi sample_truncated_multipoisson(const Eigen::VectorXd& rates,
                                              Rng& rng);

/// Refresh the sufficient statistics from ntilde.
void recompute_latent_stats(const SparseGraph& graph, LatentCounts& latent);

/// Conditional draw of all edge counts given weights (n_nodes x p): distinct
/// pairs use rates 2 w_ik w_jk, self-loops draw half-counts at rates w_ik^2
/// and store the doubled value.
LatentCounts resample_latent_counts(const SparseGraph& graph,
                                    const Eigen::MatrixXd& weights, Rng& rng);

}  // namespace ccrm
