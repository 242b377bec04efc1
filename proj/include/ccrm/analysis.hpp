#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ccrm/graph.hpp"
#include "ccrm/mcmc.hpp"
#include "ccrm/params.hpp"
#include "ccrm/rng.hpp"

namespace ccrm {

struct DegreeSummary {
  Eigen::VectorXi degrees;       // self-loops count twice
  std::map<int, int> histogram;  // degree -> node count
  double mean = 0.0;
  double stddev = 0.0;
  double clustering = 0.0;  // 3 * triangles / connected triples, in [0,1]
};

DegreeSummary degree_summary(const SparseGraph& graph);

struct ScalingPoint {
  double alpha = 0.0;
  double n_nodes = 0.0;  // averaged over reps
  double n_edges = 0.0;
};

struct ScalingRun {
  std::vector<ScalingPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

/// Least-squares fit of log n_edges against log n_nodes over the recorded
/// points; zero-count points are dropped with a warning.
void fit_loglog(ScalingRun& run);

/// Generate `reps` graphs per grid value of alpha and fit the edge-vs-node
/// growth exponent. epsilon < 0 selects the generation default.
ScalingRun sparsity_scan(const CcrmParams& params,
                         const std::vector<double>& alpha_grid, int reps,
                         std::uint64_t seed, double epsilon = -1.0);

struct PredictiveStatSelector {
  bool degree_hist = true;
  bool degree_std = true;
  bool clustering = true;
};

struct PredictiveChecks {
  std::vector<std::map<int, int>> degree_hist;  // one histogram per replicate
  std::vector<double> degree_std;
  std::vector<double> clustering;

  /// Per-degree central band of node counts at the given level.
  std::map<int, std::pair<double, double>> degree_band(double level) const;
};

/// For each retained posterior sample of (alpha, hyper), generate a fresh
/// graph and compute the selected statistics.
PredictiveChecks posterior_predictive(const std::vector<Trace>& traces,
                                      const McmcConfig& model, long burnin,
                                      int n_samples,
                                      const PredictiveStatSelector& stats,
                                      double gen_epsilon, std::uint64_t seed);

enum class NodeSelector { kAll, kHighestDegree50, kLowestDegree50 };

struct CredibleInterval {
  int node = 0;
  double lower = 0.0;
  double median = 0.0;
  double upper = 0.0;
};

/// Per-node equal-tailed intervals for the mean weights (1/p) sum_k w_ik,
/// from the weight snapshots past burn-in.
std::vector<CredibleInterval> credible_intervals(
    const std::vector<Trace>& traces, long burnin, const SparseGraph& graph,
    NodeSelector selector, double level);

struct PointEstimate {
  Eigen::MatrixXd w_hat;       // N x p
  Eigen::VectorXd w_star_hat;  // p
  int source_index = -1;       // snapshot index the estimate came from
  double risk = 0.0;
};

/// Column-matching cost between two weight configurations: the p x p matrix
/// of column costs sum_i |w_a(i,k) - w_b(i,l)| + |ws_a(k) - ws_b(l)| solved
/// exactly; returns the minimal cost and the permutation (column of b
/// matched to each column of a).
std::pair<double, std::vector<int>> assignment_cost(
    const Eigen::MatrixXd& w_a, const Eigen::MatrixXd& w_b,
    const Eigen::VectorXd& wstar_a, const Eigen::VectorXd& wstar_b);

/// The retained sample minimizing the average assignment cost against all
/// retained samples (subsampled to at most max_samples).
PointEstimate bayes_point_estimate(const std::vector<Trace>& traces,
                                   long burnin, int max_samples = 500);

/// Nodes ordered by (argmax community, descending total weight); ties in the
/// argmax go to the lowest community index.
std::vector<int> community_reorder(const SparseGraph& graph,
                                   const PointEstimate& estimate);

}  // namespace ccrm
