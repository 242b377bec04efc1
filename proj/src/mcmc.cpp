#include "ccrm/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "ccrm/atoms.hpp"
#include "ccrm/levy.hpp"
#include "ccrm/quadrature.hpp"
#include "ccrm/scores.hpp"

namespace ccrm {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

CcrmParams McmcConfig::make_params(const HyperState& hyper) const {
  return CcrmParams(p, GgpParams(hyper.sigma, hyper.tau), hyper.a, hyper.b,
                    gamma_or_zero(), degenerate_scores);
}

void McmcConfig::validate() const {
  if (p < 1) throw std::invalid_argument("McmcConfig: p must be >= 1");
  if (gamma_tilt.size() != 0 && gamma_tilt.size() != p) {
    throw std::invalid_argument("McmcConfig: gamma_tilt must have length p");
  }
  priors.validate();
  if (iters < 1 || chains < 1 || thin < 1 || leapfrog_steps < 1) {
    throw std::invalid_argument("McmcConfig: iters, chains, thin, leapfrog_steps must be >= 1");
  }
  if (burnin < 0 || init_iters < 0) {
    throw std::invalid_argument("McmcConfig: burnin and init_iters must be >= 0");
  }
  if (!(adapt_fraction >= 0.0 && adapt_fraction <= 1.0)) {
    throw std::invalid_argument("McmcConfig: adapt_fraction must be in [0,1]");
  }
  if (!(mass_epsilon > 0.0)) {
    throw std::invalid_argument("McmcConfig: mass_epsilon must be > 0");
  }
  if (degenerate_scores && (priors.a_free || priors.b_free)) {
    throw std::invalid_argument(
        "McmcConfig: score hyperparameters cannot be free in degenerate mode");
  }
  GgpParams check(init_sigma, init_tau);  // throws when inconsistent
  (void)check;
}

namespace {

// Shared log-posterior kernel over raw components; latent enters only
// through its m statistics.
double target_value(const Eigen::VectorXd& w0, const Eigen::MatrixXd& beta,
                    const Eigen::VectorXd& w_star, const HyperState& hyper,
                    double alpha, const LatentCounts& latent,
                    const McmcConfig& cfg) {
  const int n = static_cast<int>(w0.size());
  const Eigen::VectorXd gamma = cfg.gamma_or_zero();
  const double sigma = hyper.sigma;
  const double tau = hyper.tau;

  double value = 0.0;
  if (n > 0) {
    const Eigen::MatrixXd w = beta.array().colwise() * w0.array();
    const Eigen::VectorXd totals = w_star + w.colwise().sum().transpose();
    value -= totals.squaredNorm();
    value += latent.m_row.dot(w0.array().log().matrix());
    value += (latent.m.array() * beta.array().log()).sum();
    value -= (w0.array() * (beta * gamma).array()).sum();
    value += -(1.0 + sigma) * w0.array().log().sum() - tau * w0.sum() -
             n * std::lgamma(1.0 - sigma);
    if (!cfg.degenerate_scores) {
      for (int k = 0; k < cfg.p; ++k) {
        value += (hyper.a[k] - 1.0) * beta.col(k).array().log().sum() -
                 hyper.b[k] * beta.col(k).sum() +
                 n * (hyper.a[k] * std::log(hyper.b[k]) -
                      std::lgamma(hyper.a[k]));
      }
    }
  } else {
    value -= w_star.squaredNorm();
  }
  value += n * std::log(alpha);

  const Hyperpriors& pr = cfg.priors;
  if (pr.sigma_free) value += pr.one_minus_sigma.log_density(1.0 - sigma);
  if (pr.tau_free) value += pr.tau.log_density(tau);
  if (pr.a_free) {
    if (cfg.tie_score_shapes) {
      value += pr.score_shape.log_density(hyper.a[0]);
    } else {
      for (int k = 0; k < cfg.p; ++k) value += pr.score_shape.log_density(hyper.a[k]);
    }
  }
  if (pr.b_free) {
    if (cfg.tie_score_rates) {
      value += pr.score_rate.log_density(hyper.b[0]);
    } else {
      for (int k = 0; k < cfg.p; ++k) value += pr.score_rate.log_density(hyper.b[k]);
    }
  }
  if (pr.alpha_free) value += pr.alpha.log_density(alpha);
  return value;
}

// Gradient of the log posterior in q = (log w0, log beta), including the
// exp-reparameterization terms.
void target_gradient(const Eigen::VectorXd& w0, const Eigen::MatrixXd& beta,
                     const Eigen::VectorXd& w_star, const HyperState& hyper,
                     const LatentCounts& latent, const McmcConfig& cfg,
                     Eigen::VectorXd& grad_w0, Eigen::MatrixXd& grad_beta) {
  const Eigen::VectorXd gamma = cfg.gamma_or_zero();
  const Eigen::MatrixXd w = beta.array().colwise() * w0.array();
  const Eigen::VectorXd totals = w_star + w.colwise().sum().transpose();

  grad_w0 = latent.m_row.array() - hyper.sigma -
            w0.array() * (hyper.tau + (beta * gamma).array() +
                          2.0 * (beta * totals).array());
  if (cfg.degenerate_scores) {
    grad_beta.resize(0, 0);
    return;
  }
  grad_beta = latent.m;
  grad_beta.rowwise() += hyper.a.transpose();
  Eigen::MatrixXd rate = (w0 * (gamma + 2.0 * totals).transpose());
  rate.rowwise() += hyper.b.transpose();
  grad_beta -= (beta.array() * rate.array()).matrix();
}

}  // namespace

double log_target(const McmcState& state, const SparseGraph& graph,
                  const McmcConfig& cfg) {
  if (state.w0.size() != graph.n_nodes) {
    throw std::invalid_argument("log_target: state size != graph node count");
  }
  const double value = target_value(state.w0, state.beta, state.w_star,
                                    state.hyper, state.alpha, state.latent, cfg);
  if (!std::isfinite(value)) {
    throw std::runtime_error("log_target: non-finite value; invalid state");
  }
  return value;
}

void log_target_gradient(const McmcState& state, const McmcConfig& cfg,
                         Eigen::VectorXd& grad_log_w0,
                         Eigen::MatrixXd& grad_log_beta) {
  target_gradient(state.w0, state.beta, state.w_star, state.hyper,
                  state.latent, cfg, grad_log_w0, grad_log_beta);
}

bool hmc_update(McmcState& state, const SparseGraph& graph,
                const McmcConfig& cfg, int leapfrog_steps, double step,
                Rng& rng, double* log_accept_out) {
  if (log_accept_out) *log_accept_out = 0.0;
  if (leapfrog_steps < 1 || !(step > 0.0)) {
    throw std::invalid_argument("hmc_update: need leapfrog_steps >= 1, step > 0");
  }
  const int n = graph.n_nodes;
  if (n == 0) return true;
  const bool move_beta = !cfg.degenerate_scores;

  Eigen::VectorXd q0 = state.w0.array().log();
  Eigen::MatrixXd qb;
  if (move_beta) qb = state.beta.array().log();

  auto potential = [&](const Eigen::VectorXd& w0, const Eigen::MatrixXd& beta,
                       const Eigen::VectorXd& lw0, const Eigen::MatrixXd& lbeta) {
    double u = target_value(w0, beta, state.w_star, state.hyper, state.alpha,
                            state.latent, cfg);
    u += lw0.sum();
    if (move_beta) u += lbeta.sum();
    return u;
  };

  Eigen::VectorXd w0 = state.w0;
  Eigen::MatrixXd beta = state.beta;
  Eigen::VectorXd g0;
  Eigen::MatrixXd gb;
  target_gradient(w0, beta, state.w_star, state.hyper, state.latent, cfg, g0, gb);

  Eigen::VectorXd p0(n);
  for (int i = 0; i < n; ++i) p0[i] = normal(rng);
  Eigen::MatrixXd pb;
  if (move_beta) {
    pb.resize(n, cfg.p);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < cfg.p; ++k) pb(i, k) = normal(rng);
  }

  const double u_start = potential(w0, beta, q0, qb);
  double kinetic = 0.5 * p0.squaredNorm();
  if (move_beta) kinetic += 0.5 * pb.squaredNorm();
  const double h_start = -u_start + kinetic;

  bool finite = g0.allFinite() && (!move_beta || gb.allFinite());
  Eigen::VectorXd q = q0;
  Eigen::MatrixXd qbeta = qb;
  if (finite) {
    p0 += 0.5 * step * g0;
    if (move_beta) pb += 0.5 * step * gb;
    for (int l = 0; l < leapfrog_steps && finite; ++l) {
      q += step * p0;
      if (move_beta) qbeta += step * pb;
      w0 = q.array().exp();
      if (move_beta) beta = qbeta.array().exp();
      if (!w0.allFinite() || (move_beta && !beta.allFinite())) {
        finite = false;
        break;
      }
      target_gradient(w0, beta, state.w_star, state.hyper, state.latent, cfg,
                      g0, gb);
      finite = g0.allFinite() && (!move_beta || gb.allFinite());
      if (!finite) break;
      const double scale = (l + 1 == leapfrog_steps) ? 0.5 : 1.0;
      p0 += scale * step * g0;
      if (move_beta) pb += scale * step * gb;
    }
  }

  double log_accept = kNegInf;
  if (finite) {
    const double u_end = potential(w0, beta, q, qbeta);
    double kinetic_end = 0.5 * p0.squaredNorm();
    if (move_beta) kinetic_end += 0.5 * pb.squaredNorm();
    const double h_end = -u_end + kinetic_end;
    if (std::isfinite(h_end)) log_accept = h_start - h_end;
  }
  if (log_accept_out) *log_accept_out = log_accept;
  if (std::log(uniform(rng)) < log_accept) {
    state.w0 = w0;
    if (move_beta) state.beta = beta;
    return true;
  }
  return false;
}

namespace {

HyperState propose_hyper(const HyperState& hyper, const McmcConfig& cfg,
                         double rw_step, Rng& rng) {
  HyperState prop = hyper;
  const Hyperpriors& pr = cfg.priors;
  if (pr.sigma_free) {
    prop.sigma = 1.0 - std::exp(std::log(1.0 - hyper.sigma) + rw_step * normal(rng));
  }
  if (pr.tau_free) {
    prop.tau = std::exp(std::log(hyper.tau) + rw_step * normal(rng));
  }
  if (pr.a_free) {
    if (cfg.tie_score_shapes) {
      prop.a.setConstant(std::exp(std::log(hyper.a[0]) + rw_step * normal(rng)));
    } else {
      for (int k = 0; k < cfg.p; ++k) {
        prop.a[k] = std::exp(std::log(hyper.a[k]) + rw_step * normal(rng));
      }
    }
  }
  if (pr.b_free) {
    if (cfg.tie_score_rates) {
      prop.b.setConstant(std::exp(std::log(hyper.b[0]) + rw_step * normal(rng)));
    } else {
      for (int k = 0; k < cfg.p; ++k) {
        prop.b[k] = std::exp(std::log(hyper.b[k]) + rw_step * normal(rng));
      }
    }
  }
  return prop;
}

// Prior ratio plus the log-scale change-of-variables terms for the random
// walk coordinates.
double hyper_prior_jacobian_diff(const HyperState& prop, const HyperState& cur,
                                 const McmcConfig& cfg) {
  const Hyperpriors& pr = cfg.priors;
  double d = 0.0;
  if (pr.sigma_free) {
    d += pr.one_minus_sigma.log_density(1.0 - prop.sigma) -
         pr.one_minus_sigma.log_density(1.0 - cur.sigma) +
         std::log(1.0 - prop.sigma) - std::log(1.0 - cur.sigma);
  }
  if (pr.tau_free) {
    d += pr.tau.log_density(prop.tau) - pr.tau.log_density(cur.tau) +
         std::log(prop.tau) - std::log(cur.tau);
  }
  if (pr.a_free) {
    const int reps = cfg.tie_score_shapes ? 1 : cfg.p;
    for (int k = 0; k < reps; ++k) {
      d += pr.score_shape.log_density(prop.a[k]) -
           pr.score_shape.log_density(cur.a[k]) + std::log(prop.a[k]) -
           std::log(cur.a[k]);
    }
  }
  if (pr.b_free) {
    const int reps = cfg.tie_score_rates ? 1 : cfg.p;
    for (int k = 0; k < reps; ++k) {
      d += pr.score_rate.log_density(prop.b[k]) -
           pr.score_rate.log_density(cur.b[k]) + std::log(prop.b[k]) -
           std::log(cur.b[k]);
    }
  }
  return d;
}

// sum_i log f(beta_i; prop) rho0(w0_i; prop) - same at cur.
double atom_density_diff(const Eigen::VectorXd& w0, const Eigen::MatrixXd& beta,
                         const CcrmParams& prop, const CcrmParams& cur) {
  const int n = static_cast<int>(w0.size());
  if (n == 0) return 0.0;
  double d = 0.0;
  const double dsigma = prop.base.sigma - cur.base.sigma;
  const double dtau = prop.base.tau - cur.base.tau;
  d += -dsigma * w0.array().log().sum() - dtau * w0.sum() -
       n * (std::lgamma(1.0 - prop.base.sigma) -
            std::lgamma(1.0 - cur.base.sigma));
  if (!prop.degenerate_scores) {
    for (int k = 0; k < prop.p; ++k) {
      d += (prop.a[k] - cur.a[k]) * beta.col(k).array().log().sum() -
           (prop.b[k] - cur.b[k]) * beta.col(k).sum() +
           n * (prop.a[k] * std::log(prop.b[k]) - std::lgamma(prop.a[k]) -
                cur.a[k] * std::log(cur.b[k]) + std::lgamma(cur.a[k]));
    }
  }
  return d;
}

}  // namespace

double mh_log_ratio(const McmcState& state, const HyperState& hyper_prop,
                    const Eigen::VectorXd& w_star_prop, double psi_cur_at_lt,
                    double psi_prop_at_l, const SparseGraph& graph,
                    const McmcConfig& cfg) {
  const CcrmParams params_cur = cfg.make_params(state.hyper);
  const CcrmParams params_prop = cfg.make_params(hyper_prop);
  double log_r = hyper_prior_jacobian_diff(hyper_prop, state.hyper, cfg);
  log_r += atom_density_diff(state.w0, state.beta, params_prop, params_cur);
  const double n = static_cast<double>(graph.n_nodes);
  if (cfg.priors.alpha_free) {
    log_r += (cfg.priors.alpha.shape + n) *
             (std::log(cfg.priors.alpha.rate + psi_cur_at_lt) -
              std::log(cfg.priors.alpha.rate + psi_prop_at_l));
  } else {
    log_r += state.alpha * (psi_cur_at_lt - psi_prop_at_l);
  }
  log_r += state.w_star.squaredNorm() - w_star_prop.squaredNorm();
  return log_r;
}

bool mh_hyper_and_mass_update(McmcState& state, const SparseGraph& graph,
                              const McmcConfig& cfg, Rng& rng,
                              double* log_accept_out) {
  if (log_accept_out) *log_accept_out = kNegInf;
  const HyperState hyper_prop = propose_hyper(state.hyper, cfg, state.rw_step, rng);

  CcrmParams params_prop = cfg.make_params(state.hyper);  // placeholder shape
  try {
    params_prop = cfg.make_params(hyper_prop);
  } catch (const std::invalid_argument&) {
    // Proposed (sigma, tau) left the valid region (possible when tau is
    // fixed at zero); reject.
    return false;
  }

  Eigen::VectorXd lambda = state.w_star;
  if (graph.n_nodes > 0) {
    lambda += 2.0 * state.weights().colwise().sum().transpose();
  }

  double psi_prop_at_l;
  try {
    psi_prop_at_l = laplace_exponent(lambda, params_prop);
  } catch (const QuadratureError& err) {
    std::cerr << "[ccrm] warning: rejecting hyper move, " << err.what()
              << " (error=" << err.error << ")\n";
    return false;
  }

  double alpha_prop = state.alpha;
  if (cfg.priors.alpha_free) {
    alpha_prop = gamma(cfg.priors.alpha.shape + graph.n_nodes,
                       cfg.priors.alpha.rate + psi_prop_at_l, rng);
  }
  Eigen::VectorXd w_star_prop;
  try {
    w_star_prop = sample_remainder_mass(params_prop, alpha_prop, lambda,
                                        cfg.mass_epsilon, rng)
                      .w_star;
  } catch (const std::runtime_error& err) {
    std::cerr << "[ccrm] warning: rejecting hyper move, " << err.what() << "\n";
    return false;
  }

  const Eigen::VectorXd lambda_tilde =
      lambda - state.w_star + w_star_prop;  // w_star_prop + 2 column sums
  double psi_cur_at_lt;
  try {
    psi_cur_at_lt = laplace_exponent(lambda_tilde, cfg.make_params(state.hyper));
  } catch (const QuadratureError& err) {
    std::cerr << "[ccrm] warning: rejecting hyper move, " << err.what()
              << " (error=" << err.error << ")\n";
    return false;
  }

  const double log_r = mh_log_ratio(state, hyper_prop, w_star_prop,
                                    psi_cur_at_lt, psi_prop_at_l, graph, cfg);
  if (log_accept_out) *log_accept_out = log_r;
  if (std::log(uniform(rng)) < log_r) {
    state.hyper = hyper_prop;
    state.alpha = alpha_prop;
    state.w_star = w_star_prop;
    return true;
  }
  return false;
}

SweepResult mcmc_sweep(McmcState& state, const SparseGraph& graph,
                       const McmcConfig& cfg, Rng& rng) {
  SweepResult res;
  res.hmc_accepted = hmc_update(state, graph, cfg, cfg.leapfrog_steps,
                                state.hmc_step, rng, &res.hmc_log_accept);
  res.mh_accepted =
      mh_hyper_and_mass_update(state, graph, cfg, rng, &res.mh_log_accept);
  if (graph.n_edges() > 0) {
    state.latent = resample_latent_counts(graph, state.weights(), rng);
  }
  return res;
}

McmcState init_state(const SparseGraph& graph, const McmcConfig& cfg,
                     Rng& rng) {
  McmcState state;
  const int n = graph.n_nodes;
  state.w0 = Eigen::VectorXd::Ones(n);
  state.beta = Eigen::MatrixXd::Ones(n, cfg.p);
  state.w_star = Eigen::VectorXd::Constant(cfg.p, 1.0 / cfg.p);
  state.hyper.sigma = cfg.init_sigma;
  state.hyper.tau = cfg.init_tau;
  state.hyper.a = Eigen::VectorXd::Constant(cfg.p, cfg.init_a);
  state.hyper.b = Eigen::VectorXd::Constant(cfg.p, cfg.init_b);
  state.alpha = cfg.init_alpha > 0.0 ? cfg.init_alpha
                                     : std::max(1, graph.n_nodes);
  state.hmc_step = cfg.init_hmc_step;
  state.rw_step = cfg.init_rw_step;
  if (graph.n_edges() > 0) {
    state.latent = resample_latent_counts(graph, state.weights(), rng);
  } else {
    state.latent.ntilde.resize(0, cfg.p);
    recompute_latent_stats(graph, state.latent);
  }
  return state;
}

LatentCounts latent_from_counts(const SparseGraph& graph,
                                const std::vector<int>& node_ids,
                                const MultiCounts& counts) {
  LatentCounts latent;
  latent.ntilde.resize(graph.n_edges(), counts.p);
  for (int e = 0; e < graph.n_edges(); ++e) {
    const auto& [i, j] = graph.edges[e];
    const int oi = node_ids[i];
    const int oj = node_ids[j];
    for (int k = 0; k < counts.p; ++k) {
      latent.ntilde(e, k) = (i == j)
                                ? 2 * counts.at(oi, oi, k)
                                : counts.at(oi, oj, k) + counts.at(oj, oi, k);
    }
  }
  recompute_latent_stats(graph, latent);
  return latent;
}

namespace {

void adapt_step(double& step, long t, double acc_prob, double target) {
  const double rate = std::pow(static_cast<double>(t), -0.6);
  step = std::clamp(std::exp(std::log(step) + rate * (acc_prob - target)),
                    1e-7, 1e3);
}

double capped_accept(double log_accept) {
  return std::min(1.0, std::exp(std::min(log_accept, 0.0)));
}

Trace run_single_chain(const SparseGraph& graph, const McmcConfig& cfg,
                       int chain) {
  Rng rng = make_rng(cfg.seed, static_cast<std::uint64_t>(chain) + 1);
  McmcState state;

  const bool needs_warm_start =
      cfg.init_iters > 0 && !(cfg.p == 1 && cfg.degenerate_scores);
  if (needs_warm_start) {
    McmcConfig warm = cfg;
    warm.p = 1;
    warm.degenerate_scores = true;
    warm.priors.a_free = false;
    warm.priors.b_free = false;
    warm.gamma_tilt = Eigen::VectorXd::Zero(1);
    McmcState warm_state = init_state(graph, warm, rng);
    for (long t = 1; t <= cfg.init_iters; ++t) {
      SweepResult res = mcmc_sweep(warm_state, graph, warm, rng);
      adapt_step(warm_state.hmc_step, t, capped_accept(res.hmc_log_accept), 0.65);
      adapt_step(warm_state.rw_step, t, capped_accept(res.mh_log_accept), 0.23);
    }
    state = init_state(graph, cfg, rng);
    state.w0 = warm_state.w0;
    state.hyper.sigma = warm_state.hyper.sigma;
    state.hyper.tau = warm_state.hyper.tau;
    state.alpha = warm_state.alpha;
    state.w_star =
        Eigen::VectorXd::Constant(cfg.p, warm_state.w_star.sum() / cfg.p);
    state.hmc_step = warm_state.hmc_step;
    if (graph.n_edges() > 0) {
      state.latent = resample_latent_counts(graph, state.weights(), rng);
    }
  } else {
    state = init_state(graph, cfg, rng);
  }

  Trace trace;
  trace.chain_id = chain;
  trace.thin = cfg.thin;
  trace.p = cfg.p;
  trace.n_nodes = graph.n_nodes;
  trace.records.reserve(cfg.iters / cfg.thin + 1);

  const long adapt_end = std::lround(cfg.adapt_fraction * cfg.iters);
  for (long t = 1; t <= cfg.iters; ++t) {
    SweepResult res = mcmc_sweep(state, graph, cfg, rng);
    if (t <= adapt_end) {
      adapt_step(state.hmc_step, t, capped_accept(res.hmc_log_accept), 0.65);
      adapt_step(state.rw_step, t, capped_accept(res.mh_log_accept), 0.23);
    }
    if (t % cfg.thin == 0) {
      TraceRecord rec;
      rec.iter = t;
      rec.log_alpha = std::log(state.alpha);
      rec.sigma = state.hyper.sigma;
      rec.tau = state.hyper.tau;
      rec.a = state.hyper.a;
      rec.b = state.hyper.b;
      rec.w_star = state.w_star;
      rec.log_target = log_target(state, graph, cfg);
      rec.acc_hmc = res.hmc_accepted ? 1 : 0;
      rec.acc_mh = res.mh_accepted ? 1 : 0;
      rec.mean_weight = graph.n_nodes > 0 ? state.weights().mean() : 0.0;
      trace.records.push_back(std::move(rec));
    }
    if (cfg.weight_stride > 0 && t > cfg.burnin &&
        t % cfg.weight_stride == 0) {
      trace.snapshots.push_back({t, state.weights(), state.w_star});
    }
  }
  return trace;
}

}  // namespace

std::vector<Trace> run_mcmc(const SparseGraph& graph, const McmcConfig& cfg) {
  cfg.validate();
  graph.validate();
  if (graph.n_edges() == 0) {
    throw std::invalid_argument("run_mcmc: graph has no edges");
  }
  std::vector<Trace> traces(cfg.chains);
  if (cfg.parallel_chains && cfg.chains > 1) {
    std::vector<std::thread> workers;
    workers.reserve(cfg.chains);
    for (int c = 0; c < cfg.chains; ++c) {
      workers.emplace_back(
          [&, c]() { traces[c] = run_single_chain(graph, cfg, c); });
    }
    for (auto& w : workers) w.join();
  } else {
    for (int c = 0; c < cfg.chains; ++c) {
      traces[c] = run_single_chain(graph, cfg, c);
    }
  }
  return traces;
}

// ---- bipartite sampler ----

namespace {

void recompute_bipartite_stats(const BipartiteGraph& graph,
                               BipartiteState& state) {
  const int p = static_cast<int>(state.n.cols());
  state.rows.m = Eigen::MatrixXd::Zero(graph.n_rows, p);
  state.cols.m = Eigen::MatrixXd::Zero(graph.n_cols, p);
  for (int e = 0; e < graph.n_edges(); ++e) {
    const auto& [i, j] = graph.edges[e];
    state.rows.m.row(i) += state.n.row(e).cast<double>();
    state.cols.m.row(j) += state.n.row(e).cast<double>();
  }
  state.rows.m_row = state.rows.m.rowwise().sum();
  state.cols.m_row = state.cols.m.rowwise().sum();
}

// Joint (hyper, alpha, w_star) move for one side; the opposite-side totals
// act as a fixed exponential tilt, so the proposal tilt equals the backward
// tilt and the total-mass exponents cancel.
bool bipartite_mh(BipartiteSide& side, const Eigen::VectorXd& opposite_totals,
                  const McmcConfig& cfg, Rng& rng) {
  const HyperState hyper_prop = propose_hyper(side.hyper, cfg, side.rw_step, rng);
  CcrmParams params_cur = cfg.make_params(side.hyper);
  CcrmParams params_prop = params_cur;
  try {
    params_prop = cfg.make_params(hyper_prop);
  } catch (const std::invalid_argument&) {
    return false;
  }
  double psi_cur, psi_prop;
  try {
    psi_cur = laplace_exponent(opposite_totals, params_cur);
    psi_prop = laplace_exponent(opposite_totals, params_prop);
  } catch (const QuadratureError& err) {
    std::cerr << "[ccrm] warning: rejecting bipartite hyper move, "
              << err.what() << "\n";
    return false;
  }
  const double n = static_cast<double>(side.w0.size());
  double alpha_prop = side.alpha;
  if (cfg.priors.alpha_free) {
    alpha_prop = gamma(cfg.priors.alpha.shape + n,
                       cfg.priors.alpha.rate + psi_prop, rng);
  }
  Eigen::VectorXd w_star_prop;
  try {
    w_star_prop = sample_remainder_mass(params_prop, alpha_prop,
                                        opposite_totals, cfg.mass_epsilon, rng)
                      .w_star;
  } catch (const std::runtime_error& err) {
    std::cerr << "[ccrm] warning: rejecting bipartite hyper move, "
              << err.what() << "\n";
    return false;
  }

  double log_r = hyper_prior_jacobian_diff(hyper_prop, side.hyper, cfg);
  log_r += atom_density_diff(side.w0, side.beta, params_prop, params_cur);
  if (cfg.priors.alpha_free) {
    log_r += (cfg.priors.alpha.shape + n) *
             (std::log(cfg.priors.alpha.rate + psi_cur) -
              std::log(cfg.priors.alpha.rate + psi_prop));
  } else {
    log_r += side.alpha * (psi_cur - psi_prop);
  }
  if (std::log(uniform(rng)) < log_r) {
    side.hyper = hyper_prop;
    side.alpha = alpha_prop;
    side.w_star = w_star_prop;
    return true;
  }
  return false;
}

void bipartite_side_gibbs(BipartiteSide& side,
                          const Eigen::VectorXd& opposite_totals,
                          const McmcConfig& cfg, Rng& rng) {
  const Eigen::VectorXd gamma = cfg.gamma_or_zero();
  const Eigen::VectorXd tilt = gamma + opposite_totals;
  const int n = static_cast<int>(side.w0.size());
  for (int i = 0; i < n; ++i) {
    const double rate = side.hyper.tau + side.beta.row(i).dot(tilt);
    side.w0[i] =
        ccrm::gamma(side.m_row[i] - side.hyper.sigma, rate, rng);
  }
  if (!cfg.degenerate_scores) {
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < cfg.p; ++k) {
        side.beta(i, k) = ccrm::gamma(side.hyper.a[k] + side.m(i, k),
                                      side.hyper.b[k] + side.w0[i] * tilt[k],
                                      rng);
      }
    }
  }
  side.w_star = sample_remainder_mass(cfg.make_params(side.hyper), side.alpha,
                                      opposite_totals, cfg.mass_epsilon, rng)
                    .w_star;
}

}  // namespace

BipartiteState init_bipartite_state(const BipartiteGraph& graph,
                                    const McmcConfig& cfg, Rng& rng) {
  BipartiteState state;
  auto init_side = [&](BipartiteSide& side, int n, double alpha_default) {
    side.w0 = Eigen::VectorXd::Ones(n);
    side.beta = Eigen::MatrixXd::Ones(n, cfg.p);
    side.w_star = Eigen::VectorXd::Constant(cfg.p, 1.0 / cfg.p);
    side.hyper.sigma = cfg.init_sigma;
    side.hyper.tau = cfg.init_tau;
    side.hyper.a = Eigen::VectorXd::Constant(cfg.p, cfg.init_a);
    side.hyper.b = Eigen::VectorXd::Constant(cfg.p, cfg.init_b);
    side.alpha = cfg.init_alpha > 0.0 ? cfg.init_alpha : std::max(1, static_cast<int>(alpha_default));
    side.rw_step = cfg.init_rw_step;
  };
  init_side(state.rows, graph.n_rows, graph.n_rows);
  init_side(state.cols, graph.n_cols, graph.n_cols);
  state.n.resize(graph.n_edges(), cfg.p);
  Eigen::VectorXd unit_rates = Eigen::VectorXd::Ones(cfg.p);
  for (int e = 0; e < graph.n_edges(); ++e) {
    state.n.row(e) = sample_truncated_multipoisson(unit_rates, rng);
  }
  recompute_bipartite_stats(graph, state);
  return state;
}

void bipartite_sweep(BipartiteState& state, const BipartiteGraph& graph,
                     const McmcConfig& cfg, Rng& rng, SweepResult* rows_result,
                     SweepResult* cols_result) {
  {
    const Eigen::VectorXd col_totals = state.cols.totals();
    bool acc = bipartite_mh(state.rows, col_totals, cfg, rng);
    if (rows_result) rows_result->mh_accepted = acc;
    bipartite_side_gibbs(state.rows, col_totals, cfg, rng);
  }
  // Latent counts between the two half-sweeps, as printed.
  {
    const Eigen::MatrixXd wr = state.rows.weights();
    const Eigen::MatrixXd wc = state.cols.weights();
    Eigen::VectorXd rates(cfg.p);
    for (int e = 0; e < graph.n_edges(); ++e) {
      const auto& [i, j] = graph.edges[e];
      rates = (wr.row(i).array() * wc.row(j).array()).transpose();
      state.n.row(e) = sample_truncated_multipoisson(rates, rng);
    }
    recompute_bipartite_stats(graph, state);
  }
  {
    const Eigen::VectorXd row_totals = state.rows.totals();
    bool acc = bipartite_mh(state.cols, row_totals, cfg, rng);
    if (cols_result) cols_result->mh_accepted = acc;
    bipartite_side_gibbs(state.cols, row_totals, cfg, rng);
  }
}

std::vector<std::pair<Trace, Trace>> run_bipartite_gibbs(
    const BipartiteGraph& graph, const McmcConfig& cfg) {
  cfg.validate();
  if (graph.n_edges() == 0) {
    throw std::invalid_argument("run_bipartite_gibbs: graph has no edges");
  }
  {
    std::vector<char> row_seen(graph.n_rows, 0), col_seen(graph.n_cols, 0);
    for (const auto& [i, j] : graph.edges) {
      row_seen.at(i) = 1;
      col_seen.at(j) = 1;
    }
    if (std::find(row_seen.begin(), row_seen.end(), 0) != row_seen.end() ||
        std::find(col_seen.begin(), col_seen.end(), 0) != col_seen.end()) {
      throw std::invalid_argument(
          "run_bipartite_gibbs: every node must have at least one edge");
    }
  }

  std::vector<std::pair<Trace, Trace>> traces;
  traces.reserve(cfg.chains);
  for (int c = 0; c < cfg.chains; ++c) {
    Rng rng = make_rng(cfg.seed, static_cast<std::uint64_t>(c) + 1);
    BipartiteState state = init_bipartite_state(graph, cfg, rng);
    Trace rows_trace, cols_trace;
    rows_trace.chain_id = cols_trace.chain_id = c;
    rows_trace.thin = cols_trace.thin = cfg.thin;
    rows_trace.p = cols_trace.p = cfg.p;
    rows_trace.n_nodes = graph.n_rows;
    cols_trace.n_nodes = graph.n_cols;
    const long adapt_end = std::lround(cfg.adapt_fraction * cfg.iters);
    for (long t = 1; t <= cfg.iters; ++t) {
      SweepResult rows_res, cols_res;
      bipartite_sweep(state, graph, cfg, rng, &rows_res, &cols_res);
      if (t <= adapt_end) {
        adapt_step(state.rows.rw_step, t, rows_res.mh_accepted ? 1.0 : 0.0, 0.23);
        adapt_step(state.cols.rw_step, t, cols_res.mh_accepted ? 1.0 : 0.0, 0.23);
      }
      if (t % cfg.thin == 0) {
        auto record_side = [&](const BipartiteSide& side, Trace& trace,
                               const SweepResult& res) {
          TraceRecord rec;
          rec.iter = t;
          rec.log_alpha = std::log(side.alpha);
          rec.sigma = side.hyper.sigma;
          rec.tau = side.hyper.tau;
          rec.a = side.hyper.a;
          rec.b = side.hyper.b;
          rec.w_star = side.w_star;
          rec.log_target = 0.0;
          rec.acc_mh = res.mh_accepted ? 1 : 0;
          rec.acc_hmc = 0;
          rec.mean_weight =
              side.w0.size() > 0 ? side.weights().mean() : 0.0;
          trace.records.push_back(std::move(rec));
        };
        record_side(state.rows, rows_trace, rows_res);
        record_side(state.cols, cols_trace, cols_res);
      }
      if (cfg.weight_stride > 0 && t > cfg.burnin &&
          t % cfg.weight_stride == 0) {
        rows_trace.snapshots.push_back({t, state.rows.weights(), state.rows.w_star});
        cols_trace.snapshots.push_back({t, state.cols.weights(), state.cols.w_star});
      }
    }
    traces.emplace_back(std::move(rows_trace), std::move(cols_trace));
  }
  return traces;
}

}  // namespace ccrm
