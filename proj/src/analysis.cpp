#include "ccrm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "ccrm/assignment.hpp"

namespace ccrm {

DegreeSummary degree_summary(const SparseGraph& graph) {
  DegreeSummary summary;
  summary.degrees = graph.degrees();
  const int n = graph.n_nodes;
  for (int v = 0; v < n; ++v) summary.histogram[summary.degrees[v]]++;
  if (n > 0) {
    summary.mean = summary.degrees.cast<double>().mean();
    summary.stddev = std::sqrt(
        (summary.degrees.cast<double>().array() - summary.mean).square().sum() /
        n);
  }

  // Global transitivity over the graph with self-loops removed.
  const auto adj = graph.adjacency(/*include_self=*/false);
  long triples = 0;
  for (int v = 0; v < n; ++v) {
    const long d = static_cast<long>(adj[v].size());
    triples += d * (d - 1) / 2;
  }
  long triangle_paths = 0;  // ordered pairs of edges closing a triangle
  for (const auto& [i, j] : graph.edges) {
    if (i == j) continue;
    // count common neighbors of i and j
    const auto& a = adj[i];
    const auto& b = adj[j];
    std::size_t x = 0, y = 0;
    while (x < a.size() && y < b.size()) {
      if (a[x] == b[y]) {
        ++triangle_paths;
        ++x;
        ++y;
      } else if (a[x] < b[y]) {
        ++x;
      } else {
        ++y;
      }
    }
  }
  // Each triangle contributes one common neighbor per of its 3 edges.
  summary.clustering = triples > 0
                           ? static_cast<double>(triangle_paths) /
                                 static_cast<double>(triples)
                           : 0.0;
  return summary;
}

void fit_loglog(ScalingRun& run) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& point : run.points) {
    if (point.n_nodes > 0.0 && point.n_edges > 0.0) {
      pts.emplace_back(std::log(point.n_nodes), std::log(point.n_edges));
    } else {
      std::cerr << "[ccrm] warning: dropping degenerate scaling point at alpha="
                << point.alpha << "\n";
    }
  }
  const int n = static_cast<int>(pts.size());
  if (n < 2) {
    throw std::invalid_argument("fit_loglog: need at least 2 positive points");
  }
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  run.slope = sxy / sxx;
  run.intercept = my - run.slope * mx;
  double ss_res = 0.0;
  for (const auto& [x, y] : pts) {
    const double r = y - (run.intercept + run.slope * x);
    ss_res += r * r;
  }
  run.slope_stderr =
      n > 2 ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
}

ScalingRun sparsity_scan(const CcrmParams& params,
                         const std::vector<double>& alpha_grid, int reps,
                         std::uint64_t seed, double epsilon) {
  if (alpha_grid.size() < 4) {
    throw std::invalid_argument("sparsity_scan: need at least 4 grid points");
  }
  if (reps < 1) throw std::invalid_argument("sparsity_scan: reps must be >= 1");
  const double eps = epsilon >= 0.0 ? epsilon : default_generation_epsilon(params);
  ScalingRun run;
  std::uint64_t draw_index = 0;
  for (double alpha : alpha_grid) {
    double nodes = 0.0, edges = 0.0;
    for (int r = 0; r < reps; ++r) {
      GraphDraw draw = generate_graph(params, alpha, eps,
                                      seed + 1000003ULL * (++draw_index));
      auto [sub, ids] = connected_subgraph(draw.graph);
      nodes += sub.n_nodes;
      edges += sub.n_edges();
    }
    run.points.push_back({alpha, nodes / reps, edges / reps});
  }
  fit_loglog(run);
  return run;
}

std::map<int, std::pair<double, double>> PredictiveChecks::degree_band(
    double level) const {
  std::map<int, std::pair<double, double>> band;
  const int reps = static_cast<int>(degree_hist.size());
  if (reps == 0) return band;
  int max_degree = 0;
  for (const auto& hist : degree_hist) {
    if (!hist.empty()) max_degree = std::max(max_degree, hist.rbegin()->first);
  }
  const double lo_q = 0.5 * (1.0 - level);
  const double hi_q = 1.0 - lo_q;
  std::vector<double> counts(reps);
  for (int d = 0; d <= max_degree; ++d) {
    for (int r = 0; r < reps; ++r) {
      auto it = degree_hist[r].find(d);
      counts[r] = it == degree_hist[r].end() ? 0.0 : it->second;
    }
    std::sort(counts.begin(), counts.end());
    auto quantile = [&](double q) {
      const double pos = q * (reps - 1);
      const int lo = static_cast<int>(std::floor(pos));
      const int hi = std::min(lo + 1, reps - 1);
      return counts[lo] + (pos - lo) * (counts[hi] - counts[lo]);
    };
    band[d] = {quantile(lo_q), quantile(hi_q)};
  }
  return band;
}

PredictiveChecks posterior_predictive(const std::vector<Trace>& traces,
                                      const McmcConfig& model, long burnin,
                                      int n_samples,
                                      const PredictiveStatSelector& stats,
                                      double gen_epsilon, std::uint64_t seed) {
  struct Sample {
    double alpha;
    HyperState hyper;
  };
  std::vector<Sample> pool;
  for (const auto& trace : traces) {
    for (const auto& rec : trace.records) {
      if (rec.iter <= burnin) continue;
      Sample s;
      s.alpha = std::exp(rec.log_alpha);
      s.hyper.sigma = rec.sigma;
      s.hyper.tau = rec.tau;
      s.hyper.a = rec.a;
      s.hyper.b = rec.b;
      pool.push_back(std::move(s));
    }
  }
  if (pool.empty()) {
    throw std::invalid_argument("posterior_predictive: no records past burn-in");
  }
  if (n_samples < 1) {
    throw std::invalid_argument("posterior_predictive: n_samples must be >= 1");
  }

  PredictiveChecks checks;
  const double stride =
      static_cast<double>(pool.size()) / static_cast<double>(n_samples);
  for (int s = 0; s < n_samples; ++s) {
    const auto& sample =
        pool[std::min(pool.size() - 1,
                      static_cast<std::size_t>(std::floor(s * stride)))];
    const CcrmParams params = model.make_params(sample.hyper);
    const double eps =
        gen_epsilon >= 0.0 ? gen_epsilon : default_generation_epsilon(params);
    GraphDraw draw = generate_graph(params, sample.alpha, eps,
                                    seed + 7919ULL * (s + 1));
    auto [graph, ids] = connected_subgraph(draw.graph);
    const DegreeSummary summary = degree_summary(graph);
    if (stats.degree_hist) checks.degree_hist.push_back(summary.histogram);
    if (stats.degree_std) checks.degree_std.push_back(summary.stddev);
    if (stats.clustering) checks.clustering.push_back(summary.clustering);
  }
  return checks;
}

std::vector<CredibleInterval> credible_intervals(
    const std::vector<Trace>& traces, long burnin, const SparseGraph& graph,
    NodeSelector selector, double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("credible_intervals: level must be in (0,1)");
  }
  std::vector<const WeightSnapshot*> snaps;
  for (const auto& trace : traces) {
    for (const auto& snap : trace.snapshots) {
      if (snap.iter > burnin) snaps.push_back(&snap);
    }
  }
  if (snaps.empty()) {
    throw std::invalid_argument("credible_intervals: no snapshots past burn-in");
  }
  const int n = static_cast<int>(snaps.front()->w.rows());

  std::vector<int> nodes;
  if (selector == NodeSelector::kAll) {
    nodes.resize(n);
    for (int v = 0; v < n; ++v) nodes[v] = v;
  } else {
    Eigen::VectorXi deg = graph.degrees();
    if (deg.size() != n) {
      throw std::invalid_argument("credible_intervals: graph/snapshot mismatch");
    }
    std::vector<int> order(n);
    for (int v = 0; v < n; ++v) order[v] = v;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return selector == NodeSelector::kHighestDegree50 ? deg[a] > deg[b]
                                                        : deg[a] < deg[b];
    });
    order.resize(std::min(n, 50));
    nodes = order;
  }

  std::vector<CredibleInterval> out;
  out.reserve(nodes.size());
  std::vector<double> values(snaps.size());
  const double lo_q = 0.5 * (1.0 - level);
  for (int v : nodes) {
    for (std::size_t s = 0; s < snaps.size(); ++s) {
      values[s] = snaps[s]->w.row(v).mean();
    }
    std::sort(values.begin(), values.end());
    auto quantile = [&](double q) {
      const double pos = q * (values.size() - 1);
      const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
      const std::size_t hi = std::min(lo + 1, values.size() - 1);
      return values[lo] + (pos - lo) * (values[hi] - values[lo]);
    };
    out.push_back({v, quantile(lo_q), quantile(0.5), quantile(1.0 - lo_q)});
  }
  return out;
}

std::pair<double, std::vector<int>> assignment_cost(
    const Eigen::MatrixXd& w_a, const Eigen::MatrixXd& w_b,
    const Eigen::VectorXd& wstar_a, const Eigen::VectorXd& wstar_b) {
  if (w_a.rows() != w_b.rows() || w_a.cols() != w_b.cols() ||
      wstar_a.size() != w_a.cols() || wstar_b.size() != w_b.cols()) {
    throw std::invalid_argument("assignment_cost: shape mismatch");
  }
  const int p = static_cast<int>(w_a.cols());
  Eigen::MatrixXd cost(p, p);
  for (int k = 0; k < p; ++k) {
    for (int l = 0; l < p; ++l) {
      cost(k, l) = (w_a.col(k) - w_b.col(l)).cwiseAbs().sum() +
                   std::abs(wstar_a[k] - wstar_b[l]);
    }
  }
  return solve_assignment(cost);
}

PointEstimate bayes_point_estimate(const std::vector<Trace>& traces,
                                   long burnin, int max_samples) {
  if (max_samples < 2) {
    throw std::invalid_argument("bayes_point_estimate: max_samples must be >= 2");
  }
  std::vector<const WeightSnapshot*> snaps;
  for (const auto& trace : traces) {
    for (const auto& snap : trace.snapshots) {
      if (snap.iter > burnin) snaps.push_back(&snap);
    }
  }
  if (snaps.size() < 2) {
    throw std::invalid_argument(
        "bayes_point_estimate: need at least 2 snapshots past burn-in");
  }
  if (static_cast<int>(snaps.size()) > max_samples) {
    std::vector<const WeightSnapshot*> thinned;
    thinned.reserve(max_samples);
    const double stride =
        static_cast<double>(snaps.size()) / static_cast<double>(max_samples);
    for (int s = 0; s < max_samples; ++s) {
      thinned.push_back(snaps[static_cast<std::size_t>(std::floor(s * stride))]);
    }
    snaps = std::move(thinned);
  }

  const int n = static_cast<int>(snaps.size());
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      cross(i, j) = cross(j, i) =
          assignment_cost(snaps[i]->w, snaps[j]->w, snaps[i]->w_star,
                          snaps[j]->w_star)
              .first;
    }
  }
  int best = 0;
  double best_risk = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double risk = cross.row(i).sum() / n;
    if (risk < best_risk) {
      best_risk = risk;
      best = i;
    }
  }
  PointEstimate estimate;
  estimate.w_hat = snaps[best]->w;
  estimate.w_star_hat = snaps[best]->w_star;
  estimate.source_index = best;
  estimate.risk = best_risk;
  return estimate;
}

std::vector<int> community_reorder(const SparseGraph& graph,
                                   const PointEstimate& estimate) {
  const int n = static_cast<int>(estimate.w_hat.rows());
  if (graph.n_nodes != n) {
    throw std::invalid_argument("community_reorder: estimate/graph mismatch");
  }
  std::vector<int> community(n, 0);
  std::vector<double> total(n, 0.0);
  for (int v = 0; v < n; ++v) {
    int best = 0;
    for (int k = 1; k < estimate.w_hat.cols(); ++k) {
      if (estimate.w_hat(v, k) > estimate.w_hat(v, best)) best = k;
    }
    community[v] = best;
    total[v] = estimate.w_hat.row(v).sum();
  }
  std::vector<int> order(n);
  for (int v = 0; v < n; ++v) order[v] = v;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (community[a] != community[b]) return community[a] < community[b];
    if (total[a] != total[b]) return total[a] > total[b];
    return a < b;
  });
  return order;
}

}  // namespace ccrm
