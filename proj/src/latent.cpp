#include "ccrm/latent.hpp"

#include <stdexcept>

namespace ccrm {

Eigen::VectorXi sample_truncated_multipoisson(const Eigen::VectorXd& rates,
                                              Rng& rng) {
  if ((rates.array() < 0.0).any()) {
    throw std::invalid_argument(
        "sample_truncated_multipoisson: rates must be >= 0");
  }
  const double total_rate = rates.sum();
  if (!(total_rate > 0.0)) {
    throw std::invalid_argument(
        "sample_truncated_multipoisson: rates must have positive sum");
  }
  const long total = zero_truncated_poisson(total_rate, rng);
  return multinomial(total, rates, rng);
}

void recompute_latent_stats(const SparseGraph& graph, LatentCounts& latent) {
  const int p = static_cast<int>(latent.ntilde.cols());
  latent.m = Eigen::MatrixXd::Zero(graph.n_nodes, p);
  for (int e = 0; e < graph.n_edges(); ++e) {
    const auto& [i, j] = graph.edges[e];
    latent.m.row(i) += latent.ntilde.row(e).cast<double>();
    if (j != i) latent.m.row(j) += latent.ntilde.row(e).cast<double>();
  }
  latent.m_row = latent.m.rowwise().sum();
}

LatentCounts resample_latent_counts(const SparseGraph& graph,
                                    const Eigen::MatrixXd& weights, Rng& rng) {
  if (weights.rows() != graph.n_nodes) {
    throw std::invalid_argument(
        "resample_latent_counts: weights rows != node count");
  }
  const int p = static_cast<int>(weights.cols());
  LatentCounts latent;
  latent.ntilde.resize(graph.n_edges(), p);
  Eigen::VectorXd rates(p);
  for (int e = 0; e < graph.n_edges(); ++e) {
    const auto& [i, j] = graph.edges[e];
    if (i == j) {
      rates = weights.row(i).array().square();
    } else {
      rates = 2.0 * (weights.row(i).array() * weights.row(j).array());
    }
    if (!(rates.sum() > 0.0)) {
      throw std::runtime_error(
          "resample_latent_counts: observed edge has zero rate");
    }
    Eigen::VectorXi draw = sample_truncated_multipoisson(rates, rng);
    latent.ntilde.row(e) = (i == j) ? (2 * draw).eval() : draw;
  }
  recompute_latent_stats(graph, latent);
  return latent;
}

}  // namespace ccrm
