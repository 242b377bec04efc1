#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ccrm/graph.hpp"
#include "ccrm/latent.hpp"
#include "ccrm/params.hpp"
#include "ccrm/rng.hpp"

namespace ccrm {

struct HyperState {
  double sigma = 0.1;
  double tau = 1.0;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
};

struct McmcConfig {
  int p = 1;
  Hyperpriors priors;
  Eigen::VectorXd gamma_tilt;  // zeros(p) when empty
  bool degenerate_scores = false;
  // Shared a (resp. b) across communities: the random walk moves one
  // coordinate and the prior counts one factor.
  bool tie_score_shapes = true;
  bool tie_score_rates = true;

  long iters = 200000;
  long burnin = 100000;
  long init_iters = 10000;  // single-community warm start
  int chains = 3;
  long thin = 10;
  int leapfrog_steps = 10;
  double mass_epsilon = 1e-3;  // truncation for total-mass proposals
  double adapt_fraction = 0.25;
  long weight_stride = 50;  // snapshot cadence (post burn-in)
  std::uint64_t seed = 1;

  double init_sigma = 0.1;
  double init_tau = 1.0;
  double init_a = 0.5;
  double init_b = 1.0;
  double init_alpha = 0.0;  // <= 0 means "number of observed nodes"
  double init_hmc_step = 0.1;
  double init_rw_step = 0.1;
  bool parallel_chains = true;

  Eigen::VectorXd gamma_or_zero() const {
    return gamma_tilt.size() == p ? gamma_tilt : Eigen::VectorXd::Zero(p);
  }
  CcrmParams make_params(const HyperState& hyper) const;
  void validate() const;
};

/// Full sampler state for one chain.
struct McmcState {
  Eigen::VectorXd w0;      // N
  Eigen::MatrixXd beta;    // N x p
  Eigen::VectorXd w_star;  // p
  HyperState hyper;
  double alpha = 1.0;
  LatentCounts latent;
  double hmc_step = 0.1;
  double rw_step = 0.1;

  Eigen::MatrixXd weights() const {
    return beta.array().colwise() * w0.array();
  }
};

struct TraceRecord {
  long iter = 0;
  double log_alpha = 0.0;
  double sigma = 0.0;
  double tau = 0.0;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd w_star;
  double log_target = 0.0;
  int acc_hmc = 0;
  int acc_mh = 0;
  double mean_weight = 0.0;
};

struct WeightSnapshot {
  long iter = 0;
  Eigen::MatrixXd w;  // N x p
  Eigen::VectorXd w_star;
};

struct Trace {
  int chain_id = 0;
  long thin = 1;
  int p = 0;
  long n_nodes = 0;
  std::vector<TraceRecord> records;
  std::vector<WeightSnapshot> snapshots;
};

/// Unnormalized log posterior of the full state (weight, score, total-mass,
/// and free-hyperparameter factors), up to an additive constant. Finite for
/// every valid state.
double log_target(const McmcState& state, const SparseGraph& graph,
                  const McmcConfig& cfg);

/// Gradient of the log posterior of q = (log w0, log beta) including the
/// change-of-variables term.
void log_target_gradient(const McmcState& state, const McmcConfig& cfg,
                         Eigen::VectorXd& grad_log_w0,
                         Eigen::MatrixXd& grad_log_beta);

/// Leapfrog update of the node weights in log space; hyperparameters, total
/// masses, and latent counts untouched. Returns acceptance; log_accept_out
/// (optional) receives the uncapped log acceptance ratio.
bool hmc_update(McmcState& state, const SparseGraph& graph,
                const McmcConfig& cfg, int leapfrog_steps, double step,
                Rng& rng, double* log_accept_out = nullptr);

/// Log acceptance ratio of the joint (hyper, alpha, w_star) move given the
/// two Laplace-exponent evaluations it needs: psi_cur_at_lt is
/// psi(lambda_tilde; current hyper), psi_prop_at_l is psi(lambda; proposed
/// hyper), with lambda = w_star + 2 column sums and lambda_tilde its proposed
/// counterpart.
double mh_log_ratio(const McmcState& state, const HyperState& hyper_prop,
                    const Eigen::VectorXd& w_star_prop, double psi_cur_at_lt,
                    double psi_prop_at_l, const SparseGraph& graph,
                    const McmcConfig& cfg);

/// Random-walk move on the free hyperparameters, a Gamma proposal for alpha,
/// and an independent tilted total-mass proposal, accepted jointly.
bool mh_hyper_and_mass_update(McmcState& state, const SparseGraph& graph,
                              const McmcConfig& cfg, Rng& rng,
                              double* log_accept_out = nullptr);

struct SweepResult {
  bool hmc_accepted = false;
  bool mh_accepted = false;
  double hmc_log_accept = 0.0;
  double mh_log_accept = 0.0;
};

/// One full iteration: weights (HMC), hyperparameters and total masses (MH),
/// latent counts (exact conditional).
SweepResult mcmc_sweep(McmcState& state, const SparseGraph& graph,
                       const McmcConfig& cfg, Rng& rng);

McmcState init_state(const SparseGraph& graph, const McmcConfig& cfg,
                     Rng& rng);

/// Build latent counts consistent with generated multigraph counts: combined
/// directions off-diagonal, doubled on the diagonal. node_ids maps graph node
/// -> index in the counts table.
LatentCounts latent_from_counts(const SparseGraph& graph,
                                const std::vector<int>& node_ids,
                                const MultiCounts& counts);

/// Run the full sampler: per chain, a single-community warm start with unit
/// scores, then the p-community model with step sizes adapted over the first
/// adapt_fraction of iterations and frozen afterwards. Deterministic per
/// (config, seed).
std::vector<Trace> run_mcmc(const SparseGraph& graph, const McmcConfig& cfg);

// ---- bipartite sampler ----

struct BipartiteSide {
  Eigen::VectorXd w0;
  Eigen::MatrixXd beta;
  Eigen::VectorXd w_star;
  HyperState hyper;
  double alpha = 1.0;
  double rw_step = 0.1;
  Eigen::MatrixXd m;      // per-node, per-community latent sums
  Eigen::VectorXd m_row;  // per-node totals

  Eigen::MatrixXd weights() const {
    return beta.array().colwise() * w0.array();
  }
  /// Opposite-side tilt: column sums of the weights plus the total masses.
  Eigen::VectorXd totals() const {
    Eigen::VectorXd t = w_star;
    if (w0.size() > 0) t += weights().colwise().sum().transpose();
    return t;
  }
};

struct BipartiteState {
  BipartiteSide rows;
  BipartiteSide cols;
  Eigen::MatrixXi n;  // n_edges x p directed latent counts
};

BipartiteState init_bipartite_state(const BipartiteGraph& graph,
                                    const McmcConfig& cfg, Rng& rng);

/// Gibbs conditionals printed for the bipartite model: gamma draws for w0 and
/// beta, a joint MH step for (hyper, alpha, w_star), exact tilted total-mass
/// draws, and truncated multivariate Poisson latent counts; both sides.
void bipartite_sweep(BipartiteState& state, const BipartiteGraph& graph,
                     const McmcConfig& cfg, Rng& rng,
                     SweepResult* rows_result = nullptr,
                     SweepResult* cols_result = nullptr);

std::vector<std::pair<Trace, Trace>> run_bipartite_gibbs(
    const BipartiteGraph& graph, const McmcConfig& cfg);

}  // namespace ccrm
