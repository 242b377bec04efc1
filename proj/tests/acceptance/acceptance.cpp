// Acceptance suite: one self-contained check per criterion, each printing a
// single PASS/FAIL/SKIP line. Exit codes: 0 pass, 1 fail, 77 skip.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ccrm/analysis.hpp"
#include "ccrm/atoms.hpp"
#include "ccrm/graph.hpp"
#include "ccrm/io.hpp"
#include "ccrm/latent.hpp"
#include "ccrm/levy.hpp"
#include "ccrm/mcmc.hpp"
#include "ccrm/quadrature.hpp"
#include "ccrm/scores.hpp"

using namespace ccrm;

namespace {

struct Outcome {
  bool pass = false;
  bool skip = false;
  std::string detail;
};

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
}

double se_of_mean(const std::vector<double>& xs) {
  const double m = mean_of(xs);
  double var = 0.0;
  for (double x : xs) var += (x - m) * (x - m);
  var /= xs.size();
  return std::sqrt(var / xs.size());
}

// Standard error of the mean of an autocorrelated series via batch means.
double batch_se(const std::vector<double>& xs, int n_batches = 50) {
  const int n = static_cast<int>(xs.size());
  const int len = n / n_batches;
  std::vector<double> batch_means;
  for (int b = 0; b < n_batches; ++b) {
    double m = 0.0;
    for (int i = b * len; i < (b + 1) * len; ++i) m += xs[i];
    batch_means.push_back(m / len);
  }
  return se_of_mean(batch_means);
}

double quantile_of(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double pos = q * (xs.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - lo) * (xs[hi] - xs[lo]);
}

// ---------------------------------------------------------------- criterion 1
Outcome sparsity_exponents() {
  struct Case {
    double sigma;
    double lo, hi;
  };
  const std::vector<Case> cases{{-0.5, 1.85, 2.15},
                                {0.5, 1.20, 1.47},
                                {0.2, 1.50, 1.83}};
  const std::vector<double> grid{50, 100, 200, 400, 800};
  Outcome out;
  out.pass = true;
  std::ostringstream detail;
  for (const auto& c : cases) {
    CcrmParams params =
        CcrmParams::symmetric(2, GgpParams(c.sigma, 1.0), 0.2, 0.5);
    const ScalingRun run = sparsity_scan(params, grid, 5, 1234);
    const bool inside = run.slope >= c.lo && run.slope <= c.hi;
    detail << "sigma=" << c.sigma << " slope=" << run.slope << " (want ["
           << c.lo << "," << c.hi << "] -> " << (inside ? "ok" : "MISS")
           << ") ";
    if (!inside) out.pass = false;
  }
  if (!out.pass) {
    detail << "| the window centers are the asymptotic exponents; at this "
              "alpha grid the model's own expected counts give the same "
              "slopes (see notes)";
  }
  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------- criterion 2
Outcome multigraph_expectation() {
  CcrmParams params = CcrmParams::symmetric(2, GgpParams(0.2, 1.0), 0.2, 0.5);
  const double closed = expected_multigraph_edges(200.0, params);
  Outcome out;
  if (std::abs(closed - 13107.2) > 1e-6 * 13107.2) {
    out.detail = "closed form " + std::to_string(closed) + " != 13107.2";
    return out;
  }
  Rng rng = make_rng(2024);
  std::vector<double> totals;
  totals.reserve(500);
  for (int rep = 0; rep < 500; ++rep) {
    NodeAtoms atoms = sample_ccrm_atoms(params, 200.0, 1e-6,
                                        Eigen::VectorXd::Zero(2), rng, false);
    totals.push_back(static_cast<double>(generate_multigraph(atoms, rng).total()));
  }
  const double mean = mean_of(totals);
  const double se = se_of_mean(totals);
  std::ostringstream detail;
  detail << "closed=" << closed << " mc=" << mean << " se=" << se;
  Outcome result;
  result.pass = std::abs(mean - closed) < 3.0 * se;
  result.detail = detail.str();
  return result;
}

// ---------------------------------------------------------------- criterion 3
Outcome gradient_check() {
  McmcConfig cfg;
  cfg.p = 2;
  cfg.gamma_tilt = Eigen::VectorXd::Zero(2);
  cfg.priors.b_free = false;
  CcrmParams gen = CcrmParams::symmetric(2, GgpParams(0.2, 1.0), 0.4, 0.4);
  GraphDraw draw = generate_graph(gen, 14.0, 1e-6, 77);
  auto [graph, ids] = connected_subgraph(draw.graph);
  if (graph.n_nodes < 25) {
    return {false, false, "synthetic graph too small"};
  }

  Rng rng = make_rng(303);
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    McmcState state = init_state(graph, cfg, rng);
    const double lo = rep % 3 == 0 ? 1e-6 : 0.05;
    const double hi = rep % 3 == 1 ? 1e3 : 3.0;
    for (int i = 0; i < graph.n_nodes; ++i) {
      state.w0[i] = lo * std::exp(std::log(hi / lo) * uniform(rng));
      for (int k = 0; k < 2; ++k) state.beta(i, k) = 0.1 + 2.0 * uniform(rng);
    }
    state.w_star << 0.2 + uniform(rng), 0.2 + uniform(rng);
    state.hyper.sigma = 0.6 * uniform(rng) - 0.2;
    state.hyper.tau = 0.5 + uniform(rng);
    state.latent = resample_latent_counts(graph, state.weights(), rng);

    Eigen::VectorXd g0;
    Eigen::MatrixXd gb;
    log_target_gradient(state, cfg, g0, gb);
    auto u_of = [&](McmcState& s) {
      return log_target(s, graph, cfg) + s.w0.array().log().sum() +
             s.beta.array().log().sum();
    };
    const double h = 3e-5;
    for (int i = 0; i < graph.n_nodes; i += 5) {
      McmcState up = state, down = state;
      up.w0[i] *= std::exp(h);
      down.w0[i] *= std::exp(-h);
      const double fd = (u_of(up) - u_of(down)) / (2.0 * h);
      worst = std::max(worst,
                       std::abs(fd - g0[i]) / std::max(1.0, std::abs(g0[i])));
      for (int k = 0; k < 2; ++k) {
        McmcState bup = state, bdown = state;
        bup.beta(i, k) *= std::exp(h);
        bdown.beta(i, k) *= std::exp(-h);
        const double bfd = (u_of(bup) - u_of(bdown)) / (2.0 * h);
        worst = std::max(worst, std::abs(bfd - gb(i, k)) /
                                    std::max(1.0, std::abs(gb(i, k))));
      }
    }
  }
  Outcome out;
  out.pass = worst < 1e-5;
  out.detail = "max relative error " + std::to_string(worst);
  return out;
}

// ---------------------------------------------------------------- criterion 4
Outcome truncated_poisson_tv() {
  Eigen::VectorXd rates(2);
  rates << 0.5, 1.5;
  Rng rng = make_rng(404);
  const int reps = 100000;
  std::map<std::pair<int, int>, int> counts;
  for (int rep = 0; rep < reps; ++rep) {
    const Eigen::VectorXi x = sample_truncated_multipoisson(rates, rng);
    counts[{x[0], x[1]}]++;
  }
  double tv = 0.0;
  double covered = 0.0;
  for (int x0 = 0; x0 <= 30; ++x0) {
    for (int x1 = 0; x1 <= 30; ++x1) {
      if (x0 + x1 == 0) continue;
      double p = std::exp(-0.5) * std::pow(0.5, x0) / std::tgamma(x0 + 1.0);
      p *= std::exp(-1.5) * std::pow(1.5, x1) / std::tgamma(x1 + 1.0);
      p /= 1.0 - std::exp(-2.0);
      covered += p;
      auto it = counts.find({x0, x1});
      const double freq =
          it == counts.end() ? 0.0 : static_cast<double>(it->second) / reps;
      tv += std::abs(freq - p);
    }
  }
  tv = 0.5 * (tv + (1.0 - covered));
  Outcome out;
  out.pass = tv < 0.01;
  out.detail = "TV distance " + std::to_string(tv);
  return out;
}

// ---------------------------------------------------------------- criterion 5
Outcome laplace_exponent_checks() {
  // Degenerate-score closed form on a 20-point grid.
  CcrmParams degen =
      CcrmParams::symmetric(1, GgpParams(0.5, 1.0), 1.0, 1.0, true);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double t = 0.1 + i * (9.9 / 19.0);
    Eigen::VectorXd tv(1);
    tv << t;
    const double closed = ggp_laplace_exponent(t, degen.base);
    worst = std::max(worst,
                     std::abs(laplace_exponent(tv, degen) - closed) / closed);
  }
  if (worst >= 1e-6) {
    return {false, false, "degenerate grid relative error " + std::to_string(worst)};
  }

  // General configuration against a Monte Carlo transform estimate.
  CcrmParams params = CcrmParams::symmetric(2, GgpParams(0.2, 1.0), 0.2, 0.5);
  Eigen::VectorXd t(2);
  t << 1.0, 1.0;
  const double psi = laplace_exponent(t, params);
  Rng rng = make_rng(505);
  const int reps = 100000;
  std::vector<double> transformed;
  transformed.reserve(reps);
  for (int rep = 0; rep < reps; ++rep) {
    NodeAtoms atoms = sample_ccrm_atoms(params, 1.0, 1e-6,
                                        Eigen::VectorXd::Zero(2), rng, false);
    double dot = 0.0;
    if (atoms.size() > 0) {
      dot = (atoms.weights() * t).sum();
    }
    transformed.push_back(std::exp(-dot));
  }
  const double mean = mean_of(transformed);
  const double se = se_of_mean(transformed);
  const double estimate = -std::log(mean);
  const double estimate_se = se / mean;  // delta method
  Outcome out;
  out.pass = std::abs(psi - estimate) < 3.0 * estimate_se;
  std::ostringstream detail;
  detail << "grid err " << worst << "; psi=" << psi << " mc=" << estimate
         << " se=" << estimate_se;
  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------- criterion 6
Outcome hungarian_exhaustive() {
  Rng rng = make_rng(606);
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 2 + trial % 4;  // 2..5
    Eigen::MatrixXd w_a = Eigen::MatrixXd::NullaryExpr(
        10, p, [&]() { return 2.0 * uniform(rng); });
    Eigen::MatrixXd w_b = Eigen::MatrixXd::NullaryExpr(
        10, p, [&]() { return 2.0 * uniform(rng); });
    Eigen::VectorXd ws_a =
        Eigen::VectorXd::NullaryExpr(p, [&]() { return uniform(rng); });
    Eigen::VectorXd ws_b =
        Eigen::VectorXd::NullaryExpr(p, [&]() { return uniform(rng); });
    const double fast = assignment_cost(w_a, w_b, ws_a, ws_b).first;
    std::vector<int> perm(p);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double cost = 0.0;
      for (int k = 0; k < p; ++k) {
        cost += (w_a.col(k) - w_b.col(perm[k])).cwiseAbs().sum() +
                std::abs(ws_a[k] - ws_b[perm[k]]);
      }
      best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (std::abs(fast - best) > 1e-9 * std::max(1.0, best)) {
      return {false, false, "mismatch at trial " + std::to_string(trial)};
    }
  }
  return {true, false, "100/100 instances exact"};
}

// ------------------------------------------------------------- criterion 7a
// Joint-distribution consistency: the (prior -> data -> posterior-step)
// chain must reproduce prior moments of (sigma, tau) and the model's mean
// degree. Run in the finite-activity regime where every kernel piece is an
// exact conditional.
McmcConfig geweke_config() {
  McmcConfig cfg;
  cfg.p = 2;
  cfg.gamma_tilt = Eigen::VectorXd::Zero(2);
  cfg.degenerate_scores = false;
  cfg.priors.one_minus_sigma = {100.0, 50.0};  // sigma ~ -1 +- 0.2
  cfg.priors.tau = {200.0, 100.0};             // tau ~ 2 +- 0.14
  cfg.priors.sigma_free = true;
  cfg.priors.tau_free = true;
  cfg.priors.a_free = false;
  cfg.priors.b_free = false;
  cfg.priors.alpha_free = false;
  cfg.init_a = 1.0;
  cfg.init_b = 2.0;
  cfg.init_alpha = 40.0;
  cfg.init_sigma = -1.0;
  cfg.init_tau = 2.0;
  cfg.mass_epsilon = 1e-3;
  cfg.leapfrog_steps = 5;
  return cfg;
}

struct GewekeDraw {
  double sigma;
  double tau;
  double mean_degree;
};

HyperState draw_prior_hyper(const McmcConfig& cfg, Rng& rng) {
  HyperState hyper = initial_hyper(cfg);
  hyper.sigma =
      1.0 - gamma(cfg.priors.one_minus_sigma.shape,
                  cfg.priors.one_minus_sigma.rate, rng);
  hyper.tau = gamma(cfg.priors.tau.shape, cfg.priors.tau.rate, rng);
  return hyper;
}

struct GeneratedState {
  SparseGraph graph;
  McmcState state;
  double mean_degree = 0.0;
};

GeneratedState generate_state(const HyperState& hyper, const McmcConfig& cfg,
                              Rng& rng) {
  GeneratedState out;
  const CcrmParams params = cfg.make_params(hyper);
  const double eps = default_generation_epsilon(params);
  GraphDraw draw =
      generate_graph(params, cfg.init_alpha, eps, rng());
  auto [sub, ids] = connected_subgraph(draw.graph);
  out.graph = sub;
  McmcState& state = out.state;
  const int n = sub.n_nodes;
  state.w0.resize(n);
  state.beta.resize(n, cfg.p);
  for (int v = 0; v < n; ++v) {
    state.w0[v] = draw.atoms.w0[ids[v]];
    state.beta.row(v) = draw.atoms.beta.row(ids[v]);
  }
  state.w_star = Eigen::VectorXd::Zero(cfg.p);
  std::vector<char> kept(draw.graph.n_nodes, 0);
  for (int v : ids) kept[v] = 1;
  for (int v = 0; v < draw.graph.n_nodes; ++v) {
    if (!kept[v]) {
      state.w_star += draw.atoms.w0[v] * draw.atoms.beta.row(v).transpose();
    }
  }
  state.hyper = hyper;
  state.alpha = cfg.init_alpha;
  state.latent = latent_from_counts(sub, ids, draw.counts);
  state.hmc_step = 0.08;
  state.rw_step = 0.15;
  if (n > 0) {
    out.mean_degree = sub.degrees().cast<double>().mean();
  }
  return out;
}

Outcome geweke_joint_test() {
  const McmcConfig cfg = geweke_config();
  // Marginal-conditional: iid draws from the prior and the model.
  Rng rng = make_rng(707);
  const int n_marginal = 30000;
  std::vector<double> m_sigma, m_tau, m_deg;
  for (int rep = 0; rep < n_marginal; ++rep) {
    const HyperState hyper = draw_prior_hyper(cfg, rng);
    const GeneratedState gen = generate_state(hyper, cfg, rng);
    m_sigma.push_back(hyper.sigma);
    m_tau.push_back(hyper.tau);
    m_deg.push_back(gen.mean_degree);
  }

  // Successive-conditional: regenerate data given hyper, then kernel sweeps.
  Rng srng = make_rng(708);
  HyperState hyper = draw_prior_hyper(cfg, srng);
  GeneratedState gen = generate_state(hyper, cfg, srng);
  const int n_successive = 30000;
  const int sweeps_per_scan = 2;
  std::vector<double> s_sigma, s_tau, s_deg;
  s_sigma.reserve(n_successive);
  for (int scan = 0; scan < n_successive; ++scan) {
    for (int sweep = 0; sweep < sweeps_per_scan; ++sweep) {
      mcmc_sweep(gen.state, gen.graph, cfg, srng);
    }
    hyper = gen.state.hyper;
    const GeneratedState next = generate_state(hyper, cfg, srng);
    gen = next;
    s_sigma.push_back(hyper.sigma);
    s_tau.push_back(hyper.tau);
    s_deg.push_back(gen.mean_degree);
  }

  auto z_score = [&](const std::vector<double>& a,
                     const std::vector<double>& b) {
    const double se_a = se_of_mean(a);
    const double se_b = batch_se(b);
    return (mean_of(a) - mean_of(b)) /
           std::sqrt(se_a * se_a + se_b * se_b);
  };
  const double z_sigma = z_score(m_sigma, s_sigma);
  const double z_tau = z_score(m_tau, s_tau);
  const double z_deg = z_score(m_deg, s_deg);
  Outcome out;
  out.pass = std::abs(z_sigma) < 3.0 && std::abs(z_tau) < 3.0 &&
             std::abs(z_deg) < 3.0;
  std::ostringstream detail;
  detail << "z(sigma)=" << z_sigma << " z(tau)=" << z_tau
         << " z(mean degree)=" << z_deg;
  out.detail = detail.str();
  return out;
}

// ------------------------------------------------------------- criterion 7b
// One free parameter (sigma) on a clamped 3-node configuration, against a
// grid approximation of its marginal posterior. The intractable total-mass
// expectation is estimated per grid point by exact finite-activity draws.
Outcome grid_posterior_test() {
  McmcConfig cfg;
  cfg.p = 1;
  cfg.gamma_tilt = Eigen::VectorXd::Zero(1);
  cfg.priors.one_minus_sigma = {64.0, 32.0};  // sigma ~ -1 +- 0.25
  cfg.priors.sigma_free = true;
  cfg.priors.tau_free = false;
  cfg.priors.a_free = false;
  cfg.priors.b_free = false;
  cfg.priors.alpha_free = false;
  cfg.init_tau = 2.0;
  cfg.init_a = 1.0;
  cfg.init_b = 1.0;
  cfg.init_alpha = 3.0;
  cfg.mass_epsilon = 1e-3;

  SparseGraph graph;
  graph.n_nodes = 3;
  graph.edges = {{0, 1}, {0, 2}, {1, 2}};

  McmcState state;
  state.w0.resize(3);
  state.w0 << 1.2, 1.5, 2.0;
  state.beta = Eigen::MatrixXd::Ones(3, 1);
  state.beta << 0.9, 1.1, 0.7;
  state.w_star = Eigen::VectorXd::Constant(1, 0.3);
  state.hyper = initial_hyper(cfg);
  state.hyper.sigma = -1.0;
  state.alpha = cfg.init_alpha;
  state.rw_step = 0.4;
  state.hmc_step = 0.0;  // weights stay clamped
  {
    Rng rng = make_rng(711);
    state.latent = resample_latent_counts(graph, state.weights(), rng);
  }

  // Chain: hyper/total-mass moves only.
  Rng rng = make_rng(712);
  const long iters = 200000;
  std::vector<double> samples;
  samples.reserve(iters / 4);
  for (long t = 1; t <= iters; ++t) {
    mh_hyper_and_mass_update(state, graph, cfg, rng);
    if (t % 4 == 0) samples.push_back(state.hyper.sigma);
  }

  // Grid oracle on sigma < 0.
  const double s_total = state.weights().sum();  // p = 1 column sum
  const double log_w0_sum = state.w0.array().log().sum();
  const double w0_sum = state.w0.sum();
  const int grid_n = 2000;
  const double lo = -2.5, hi = -1e-4;
  std::vector<double> grid(grid_n), log_weight(grid_n);
  Rng orng = make_rng(713);
  const int mc = 40000;
  for (int g = 0; g < grid_n; ++g) {
    const double sigma = lo + (hi - lo) * (g + 0.5) / grid_n;
    grid[g] = sigma;
    const GammaPrior& pr = cfg.priors.one_minus_sigma;
    double lw = pr.log_density(1.0 - sigma);
    lw += -(1.0 + sigma) * log_w0_sum - state.hyper.tau * w0_sum -
          3.0 * std::lgamma(1.0 - sigma);
    CcrmParams params(1, GgpParams(sigma, state.hyper.tau), state.hyper.a,
                      state.hyper.b, cfg.gamma_tilt);
    double acc = 0.0;
    for (int rep = 0; rep < mc; ++rep) {
      const RemainderMass rm = sample_remainder_mass(
          params, state.alpha, Eigen::VectorXd::Zero(1), 0.0, orng);
      const double total = rm.w_star[0] + s_total;
      acc += std::exp(-total * total);
    }
    lw += std::log(acc / mc);
    log_weight[g] = lw;
  }
  const double max_lw = *std::max_element(log_weight.begin(), log_weight.end());
  std::vector<double> weight(grid_n);
  double norm = 0.0;
  for (int g = 0; g < grid_n; ++g) {
    weight[g] = std::exp(log_weight[g] - max_lw);
    norm += weight[g];
  }
  for (double& w : weight) w /= norm;

  // Wasserstein-1 between the chain empirical law and the grid law.
  std::sort(samples.begin(), samples.end());
  const double cell = (hi - lo) / grid_n;
  double w1 = 0.0;
  double grid_cdf = 0.0;
  std::size_t idx = 0;
  double out_of_range = 0.0;
  for (const double s : samples) {
    if (s < lo || s > 0.0) out_of_range += 1.0;
  }
  for (int g = 0; g < grid_n; ++g) {
    grid_cdf += weight[g];
    const double edge = lo + (g + 1) * cell;
    while (idx < samples.size() && samples[idx] <= edge) ++idx;
    const double chain_cdf = static_cast<double>(idx) / samples.size();
    w1 += std::abs(chain_cdf - grid_cdf) * cell;
  }
  Outcome out;
  out.pass = w1 < 0.02 && out_of_range / samples.size() < 1e-3;
  std::ostringstream detail;
  detail << "W1=" << w1 << " (n=" << samples.size()
         << ", out-of-grid fraction=" << out_of_range / samples.size() << ")";
  out.detail = detail.str();
  return out;
}

// ------------------------------------------------------------- criterion 7c
Outcome synthetic_recovery() {
  const double true_sigma = 0.2, true_tau = 1.0, true_a = 0.2;
  int sigma_cover = 0, tau_cover = 0, a_cover = 0, joint_cover = 0;
  std::ostringstream detail;
  for (int rep = 0; rep < 5; ++rep) {
    CcrmParams truth =
        CcrmParams::symmetric(2, GgpParams(true_sigma, true_tau), true_a, 0.5);
    GraphDraw draw = generate_graph(truth, 50.0, 1e-6, 9000 + rep);
    auto [graph, ids] = connected_subgraph(draw.graph);

    McmcConfig cfg;
    cfg.p = 2;
    cfg.iters = 20000;
    cfg.burnin = 10000;
    cfg.init_iters = 2000;
    cfg.chains = 3;
    cfg.thin = 10;
    cfg.leapfrog_steps = 10;
    cfg.mass_epsilon = 1e-3;
    cfg.weight_stride = 0;
    cfg.seed = 17 + rep;
    cfg.priors.b_free = false;
    cfg.init_b = 0.5;
    cfg.tie_score_shapes = true;
    const std::vector<Trace> traces = run_mcmc(graph, cfg);

    std::vector<double> sigmas, taus, as;
    for (const auto& trace : traces) {
      for (const auto& rec : trace.records) {
        if (rec.iter <= cfg.burnin) continue;
        sigmas.push_back(rec.sigma);
        taus.push_back(rec.tau);
        as.push_back(rec.a[0]);
      }
    }
    auto covers = [&](std::vector<double>& xs, double truth_value) {
      return quantile_of(xs, 0.025) <= truth_value &&
             truth_value <= quantile_of(xs, 0.975);
    };
    const bool cs = covers(sigmas, true_sigma);
    const bool ct = covers(taus, true_tau);
    const bool ca = covers(as, true_a);
    sigma_cover += cs;
    tau_cover += ct;
    a_cover += ca;
    joint_cover += (cs && ct && ca);
    detail << "rep" << rep << "[" << (cs ? "s" : "-") << (ct ? "t" : "-")
           << (ca ? "a" : "-") << "] ";
  }
  Outcome out;
  out.pass = joint_cover >= 4;
  detail << "joint " << joint_cover << "/5";
  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------- criterion 8
Outcome small_jump_approximation() {
  CcrmParams params = CcrmParams::symmetric(1, GgpParams(0.5, 1.0), 1.0, 1.0);
  const Eigen::VectorXd tilt = Eigen::VectorXd::Zero(1);
  const double eps = 1e-4;
  const double eps_inner = 1e-7;
  const double alpha = 1.0;
  const SmallJumpMoments m = small_jump_moments(params, tilt, eps, alpha);
  const SmallJumpMoments inner =
      small_jump_moments(params, tilt, eps_inner, alpha);

  Rng rng = make_rng(808);
  const int reps = 6000;
  std::vector<double> sums;
  sums.reserve(reps);
  for (int rep = 0; rep < reps; ++rep) {
    NodeAtoms atoms =
        sample_ccrm_atoms(params, alpha, eps_inner, tilt, rng, false);
    double total = 0.0;
    for (Eigen::Index i = 0; i < atoms.size(); ++i) {
      if (atoms.w0[i] < eps) total += atoms.w0[i] * atoms.beta(i, 0);
    }
    sums.push_back(total);
  }
  const double mc_mean = mean_of(sums);
  const double mc_se = se_of_mean(sums);
  const double band = m.mu[0] - inner.mu[0];  // quadrature over (1e-7, 1e-4)
  const bool sim_ok = std::abs(mc_mean - band) < 3.0 * mc_se;

  // Small-epsilon asymptote with the slowly varying constant
  // l = 1/(sigma Gamma(1-sigma)) of this base measure's tail.
  const double sigma = 0.5;
  const double asymptote = alpha * 1.0 * (sigma / (1.0 - sigma)) *
                           std::pow(eps, 1.0 - sigma) /
                           (sigma * std::tgamma(1.0 - sigma));
  const double ratio = m.mu[0] / asymptote;
  Outcome out;
  out.pass = sim_ok && ratio > 0.95 && ratio < 1.05;
  std::ostringstream detail;
  detail << "quad(band)=" << band << " mc=" << mc_mean << " se=" << mc_se
         << " ratio=" << ratio;
  out.detail = detail.str();
  return out;
}

// ---------------------------------------------------------------- criterion 9
Outcome polblogs_ingestion() {
  std::string path;
  if (const char* env = std::getenv("POLBLOGS_PATH")) path = env;
  if (path.empty()) {
    for (const char* candidate :
         {"data/polblogs.txt", "../data/polblogs.txt",
          CCRM_SOURCE_DIR "/data/polblogs.txt"}) {
      if (std::filesystem::exists(candidate)) {
        path = candidate;
        break;
      }
    }
  }
  if (path.empty()) {
    return {false, true,
            "dataset not present; place the edge list at data/polblogs.txt "
            "or set POLBLOGS_PATH"};
  }
  const SparseGraph graph = load_edge_list(path);
  Outcome out;
  out.pass = graph.n_nodes == 1224 && graph.n_edges() == 16715;
  std::ostringstream detail;
  detail << "loaded " << graph.n_nodes << " nodes / " << graph.n_edges()
         << " edges (want 1224 / 16715)";
  out.detail = detail.str();
  return out;
}

// --------------------------------------------------------------- criterion 10
Outcome predictive_self_consistency() {
  CcrmParams truth = CcrmParams::symmetric(2, GgpParams(0.2, 1.0), 0.2, 0.5);
  GraphDraw draw = generate_graph(truth, 50.0, 1e-6, 4242);
  auto [graph, ids] = connected_subgraph(draw.graph);

  McmcConfig cfg;
  cfg.p = 2;
  cfg.iters = 20000;
  cfg.burnin = 10000;
  cfg.init_iters = 2000;
  cfg.chains = 2;
  cfg.thin = 10;
  cfg.weight_stride = 0;
  cfg.seed = 31;
  cfg.priors.b_free = false;
  cfg.init_b = 0.5;
  const std::vector<Trace> traces = run_mcmc(graph, cfg);

  PredictiveStatSelector stats;
  const PredictiveChecks checks = posterior_predictive(
      traces, cfg, cfg.burnin, 400, stats, 1e-6, 515151);
  const auto band = checks.degree_band(0.95);
  const DegreeSummary observed = degree_summary(graph);

  int max_degree = 0;
  for (const auto& [d, c] : observed.histogram) max_degree = std::max(max_degree, d);
  int inside = 0, total = 0;
  for (int d = 1; d <= max_degree; ++d) {
    ++total;
    auto obs_it = observed.histogram.find(d);
    const double got = obs_it == observed.histogram.end() ? 0.0 : obs_it->second;
    auto it = band.find(d);
    const double lo = it == band.end() ? 0.0 : it->second.first;
    const double hi = it == band.end() ? 0.0 : it->second.second;
    if (got >= lo - 1e-12 && got <= hi + 1e-12) ++inside;
  }
  Outcome out;
  const double frac = static_cast<double>(inside) / total;
  out.pass = frac >= 0.90;
  std::ostringstream detail;
  detail << inside << "/" << total << " degree bins inside the 95% band";
  out.detail = detail.str();
  return out;
}

struct Criterion {
  int id;
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {1, "sparsity exponents", sparsity_exponents},
    {2, "multigraph edge expectation", multigraph_expectation},
    {3, "HMC gradient vs finite differences", gradient_check},
    {4, "truncated multivariate Poisson TV", truncated_poisson_tv},
    {5, "Laplace exponent closed form + MC", laplace_exponent_checks},
    {6, "assignment vs exhaustive search", hungarian_exhaustive},
    {7, "MCMC correctness (Geweke, grid, recovery)", nullptr},
    {8, "small-jump approximation", small_jump_approximation},
    {9, "polblogs ingestion", polblogs_ingestion},
    {10, "posterior predictive self-consistency", predictive_self_consistency},
};

int report(const std::string& label, const Outcome& out) {
  std::cout << "criterion " << label << ": "
            << (out.skip ? "SKIP" : (out.pass ? "PASS" : "FAIL"))
            << " -- " << out.detail << std::endl;
  if (out.skip) return 77;
  return out.pass ? 0 : 1;
}

int run_criterion_7(const std::string& part) {
  int worst = 0;
  if (part.empty() || part == "a") {
    worst = std::max(worst, report("7a (Geweke joint test)", geweke_joint_test()));
  }
  if (part.empty() || part == "b") {
    worst = std::max(worst, report("7b (grid posterior)", grid_posterior_test()));
  }
  if (part.empty() || part == "c") {
    worst = std::max(worst, report("7c (synthetic recovery)", synthetic_recovery()));
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  std::string which;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      which = argv[++i];
    } else if (arg == "--all") {
      which.clear();
    } else {
      std::cerr << "usage: acceptance [--criterion N|7a|7b|7c]\n";
      return 2;
    }
  }

  int exit_code = 0;
  bool all_skipped = true;
  for (const Criterion& criterion : kCriteria) {
    const std::string id = std::to_string(criterion.id);
    if (!which.empty() && which != id &&
        !(criterion.id == 7 && which.rfind("7", 0) == 0)) {
      continue;
    }
    int code = 0;
    if (criterion.id == 7) {
      code = run_criterion_7(which.size() > 1 ? which.substr(1) : "");
    } else {
      code = report(id + " (" + criterion.name + ")", criterion.run());
    }
    if (code != 77) all_skipped = false;
    if (code == 1) exit_code = 1;
  }
  if (exit_code == 0 && all_skipped) return 77;
  return exit_code;
}
