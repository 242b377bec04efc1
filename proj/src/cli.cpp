#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccrm/analysis.hpp"
#include "ccrm/io.hpp"
#include "ccrm/levy.hpp"

namespace ccrm {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_text(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + tmp.string());
  out << content;
  out.close();
  fs::rename(tmp, target);
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct CommonArgs {
  std::string config_path;
  std::string graph_path;
  std::string traces_path;
  std::string outdir;
  std::optional<std::uint64_t> seed;
};

RunConfig resolve(const CommonArgs& args) {
  RunConfig rc = load_config(args.config_path);
  if (!args.graph_path.empty()) rc.io.graph = args.graph_path;
  if (!args.traces_path.empty()) rc.io.traces = args.traces_path;
  if (!args.outdir.empty()) rc.io.outdir = args.outdir;
  if (rc.io.traces.empty()) rc.io.traces = rc.io.outdir;
  return rc;
}

json posterior_moments(const std::vector<Trace>& traces, long burnin) {
  double n = 0.0;
  double sum_sigma = 0.0, sum_tau = 0.0, sum_alpha = 0.0;
  Eigen::VectorXd sum_a, sum_b;
  double acc_hmc = 0.0, acc_mh = 0.0, total_records = 0.0;
  for (const auto& trace : traces) {
    for (const auto& rec : trace.records) {
      total_records += 1.0;
      acc_hmc += rec.acc_hmc;
      acc_mh += rec.acc_mh;
      if (rec.iter <= burnin) continue;
      if (sum_a.size() == 0) {
        sum_a = Eigen::VectorXd::Zero(rec.a.size());
        sum_b = Eigen::VectorXd::Zero(rec.b.size());
      }
      n += 1.0;
      sum_sigma += rec.sigma;
      sum_tau += rec.tau;
      sum_alpha += std::exp(rec.log_alpha);
      sum_a += rec.a;
      sum_b += rec.b;
    }
  }
  json out;
  if (n > 0.0) {
    out["samples"] = n;
    out["sigma_mean"] = sum_sigma / n;
    out["tau_mean"] = sum_tau / n;
    out["alpha_mean"] = sum_alpha / n;
    out["a_mean"] = std::vector<double>(sum_a.data(), sum_a.data() + sum_a.size());
    for (auto& v : out["a_mean"]) v = v.get<double>() / n;
    out["b_mean"] = std::vector<double>(sum_b.data(), sum_b.data() + sum_b.size());
    for (auto& v : out["b_mean"]) v = v.get<double>() / n;
  }
  if (total_records > 0.0) {
    out["acc_hmc_rate"] = acc_hmc / total_records;
    out["acc_mh_rate"] = acc_mh / total_records;
  }
  return out;
}

int run_generate(const CommonArgs& args) {
  RunConfig rc = resolve(args);
  McmcConfig& cfg = rc.mcmc;
  const CcrmParams params = cfg.make_params(initial_hyper(cfg));
  const std::uint64_t seed = args.seed.value_or(rc.generate.seed);
  const double eps = rc.generate.epsilon >= 0.0
                         ? rc.generate.epsilon
                         : default_generation_epsilon(params);

  GraphDraw draw = generate_graph(params, rc.generate.alpha, eps, seed);
  auto [graph, kept] = connected_subgraph(draw.graph);
  graph.labels.clear();
  graph.labels.reserve(graph.n_nodes);
  for (int v = 0; v < graph.n_nodes; ++v) graph.labels.push_back(std::to_string(v));
  save_edge_list(graph, rc.io.outdir + "/edges.txt");

  const Eigen::MatrixXd w = draw.atoms.size() > 0
                                ? draw.atoms.weights()
                                : Eigen::MatrixXd(0, params.p);
  Eigen::VectorXd w_star_true = Eigen::VectorXd::Zero(params.p);
  std::vector<char> is_kept(draw.graph.n_nodes, 0);
  for (int v : kept) is_kept[v] = 1;
  for (int v = 0; v < draw.graph.n_nodes; ++v) {
    if (!is_kept[v]) w_star_true += w.row(v).transpose();
  }

  json truth;
  truth["alpha"] = rc.generate.alpha;
  truth["epsilon"] = eps;
  truth["seed"] = seed;
  truth["p"] = params.p;
  truth["sigma"] = params.base.sigma;
  truth["tau"] = params.base.tau;
  truth["a"] = std::vector<double>(params.a.data(), params.a.data() + params.p);
  truth["b"] = std::vector<double>(params.b.data(), params.b.data() + params.p);
  truth["gamma"] = std::vector<double>(params.gamma_tilt.data(),
                                       params.gamma_tilt.data() + params.p);
  truth["n_atoms"] = draw.atoms.size();
  truth["n_nodes"] = graph.n_nodes;
  truth["n_edges"] = graph.n_edges();
  truth["w_star_true"] = std::vector<double>(
      w_star_true.data(), w_star_true.data() + w_star_true.size());
  json weights = json::array();
  for (int v : kept) {
    json row = json::array();
    for (int k = 0; k < params.p; ++k) row.push_back(w(v, k));
    weights.push_back(std::move(row));
  }
  truth["weights"] = std::move(weights);
  write_text(rc.io.outdir + "/truth.json", truth.dump(2) + "\n");

  std::cout << "generated " << graph.n_nodes << " connected nodes, "
            << graph.n_edges() << " edges (atoms: " << draw.atoms.size()
            << ") -> " << rc.io.outdir << "\n";
  return 0;
}

int run_fit(const CommonArgs& args) {
  RunConfig rc = resolve(args);
  if (rc.io.graph.empty()) throw ConfigError("fit: io.graph (or --graph) required");
  const SparseGraph graph = load_edge_list(rc.io.graph);
  McmcConfig cfg = rc.mcmc;
  if (args.seed) cfg.seed = *args.seed;
  const std::vector<Trace> traces = run_mcmc(graph, cfg);
  save_traces(traces, rc.io.traces);
  json summary = posterior_moments(traces, cfg.burnin);
  summary["n_nodes"] = graph.n_nodes;
  summary["n_edges"] = graph.n_edges();
  summary["chains"] = cfg.chains;
  summary["iters"] = cfg.iters;
  write_text(rc.io.traces + "/fit_summary.json", summary.dump(2) + "\n");
  std::cout << "fit complete: " << cfg.chains << " chains x " << cfg.iters
            << " iterations -> " << rc.io.traces << "\n";
  return 0;
}

int run_predict(const CommonArgs& args) {
  RunConfig rc = resolve(args);
  const std::vector<Trace> traces = load_traces(rc.io.traces);
  PredictiveStatSelector stats;
  PredictiveChecks checks =
      posterior_predictive(traces, rc.mcmc, rc.mcmc.burnin, rc.predict.samples,
                           stats, rc.predict.epsilon, rc.predict.seed);
  const auto band = checks.degree_band(0.95);

  std::map<int, int> observed;
  if (!rc.io.graph.empty()) {
    observed = degree_summary(load_edge_list(rc.io.graph)).histogram;
  }

  std::ostringstream csv;
  csv << "degree,lo,hi,observed\n";
  for (const auto& [d, lohi] : band) {
    const auto it = observed.find(d);
    csv << d << ',' << fmt17(lohi.first) << ',' << fmt17(lohi.second) << ','
        << (it == observed.end() ? 0 : it->second) << '\n';
  }
  write_text(rc.io.outdir + "/degree_band.csv", csv.str());

  auto stat_summary = [&](const std::vector<double>& xs) {
    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    auto q = [&](double p) {
      const double pos = p * (sorted.size() - 1);
      const std::size_t lo = static_cast<std::size_t>(pos);
      const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
      return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
    };
    double mean = 0.0;
    for (double x : sorted) mean += x;
    mean /= sorted.size();
    return json{{"mean", mean}, {"q025", q(0.025)}, {"q975", q(0.975)}};
  };
  json out;
  out["samples"] = rc.predict.samples;
  out["degree_std"] = stat_summary(checks.degree_std);
  out["clustering"] = stat_summary(checks.clustering);
  if (!observed.empty()) {
    const DegreeSummary obs = degree_summary(load_edge_list(rc.io.graph));
    out["observed_degree_std"] = obs.stddev;
    out["observed_clustering"] = obs.clustering;
  }
  write_text(rc.io.outdir + "/predictive.json", out.dump(2) + "\n");
  std::cout << "predictive checks over " << rc.predict.samples
            << " replicates -> " << rc.io.outdir << "\n";
  return 0;
}

int run_report(const CommonArgs& args) {
  RunConfig rc = resolve(args);
  if (rc.io.graph.empty()) throw ConfigError("report: io.graph (or --graph) required");
  const SparseGraph graph = load_edge_list(rc.io.graph);
  const std::vector<Trace> traces = load_traces(rc.io.traces);
  const long burnin = rc.mcmc.burnin;

  const PointEstimate estimate =
      bayes_point_estimate(traces, burnin, rc.report.point_estimate_samples);
  const std::vector<int> ordering = community_reorder(graph, estimate);
  const DegreeSummary degrees = degree_summary(graph);

  {
    std::ostringstream csv;
    csv << "rank,node,label,community,total_weight\n";
    for (std::size_t r = 0; r < ordering.size(); ++r) {
      const int v = ordering[r];
      int community = 0;
      for (int k = 1; k < estimate.w_hat.cols(); ++k) {
        if (estimate.w_hat(v, k) > estimate.w_hat(v, community)) community = k;
      }
      csv << r << ',' << v << ','
          << (graph.labels.empty() ? std::to_string(v) : graph.labels[v]) << ','
          << community << ',' << fmt17(estimate.w_hat.row(v).sum()) << '\n';
    }
    write_text(rc.io.outdir + "/ordering.csv", csv.str());
  }
  {
    std::ostringstream csv;
    csv << "degree,count\n";
    for (const auto& [d, c] : degrees.histogram) csv << d << ',' << c << '\n';
    write_text(rc.io.outdir + "/degree_hist.csv", csv.str());
  }
  auto write_intervals = [&](NodeSelector selector, const std::string& name) {
    const auto intervals = credible_intervals(traces, burnin, graph, selector,
                                              rc.report.credible_level);
    std::ostringstream csv;
    csv << "node,label,degree,lower,median,upper\n";
    for (const auto& ci : intervals) {
      csv << ci.node << ','
          << (graph.labels.empty() ? std::to_string(ci.node)
                                   : graph.labels[ci.node])
          << ',' << degrees.degrees[ci.node] << ',' << fmt17(ci.lower) << ','
          << fmt17(ci.median) << ',' << fmt17(ci.upper) << '\n';
    }
    write_text(rc.io.outdir + "/" + name, csv.str());
  };
  write_intervals(NodeSelector::kHighestDegree50, "credible_top50.csv");
  write_intervals(NodeSelector::kLowestDegree50, "credible_bottom50.csv");

  json report = posterior_moments(traces, burnin);
  report["risk"] = estimate.risk;
  report["point_estimate_source"] = estimate.source_index;
  report["degree_mean"] = degrees.mean;
  report["degree_std"] = degrees.stddev;
  report["clustering"] = degrees.clustering;
  report["n_nodes"] = graph.n_nodes;
  report["n_edges"] = graph.n_edges();
  write_text(rc.io.outdir + "/report.json", report.dump(2) + "\n");
  std::cout << "report -> " << rc.io.outdir << "\n";
  return 0;
}

int run_scan(const CommonArgs& args) {
  RunConfig rc = resolve(args);
  const CcrmParams params = rc.mcmc.make_params(initial_hyper(rc.mcmc));
  const std::uint64_t seed = args.seed.value_or(rc.scan.seed);
  const ScalingRun run = sparsity_scan(params, rc.scan.alpha_grid, rc.scan.reps,
                                       seed, rc.scan.epsilon);
  std::ostringstream csv;
  csv << "alpha,n_nodes,n_edges\n";
  for (const auto& pt : run.points) {
    csv << fmt17(pt.alpha) << ',' << fmt17(pt.n_nodes) << ','
        << fmt17(pt.n_edges) << '\n';
  }
  write_text(rc.io.outdir + "/scan.csv", csv.str());
  json out;
  out["slope"] = run.slope;
  out["slope_stderr"] = run.slope_stderr;
  out["intercept"] = run.intercept;
  out["reps"] = rc.scan.reps;
  json points = json::array();
  for (const auto& pt : run.points) {
    points.push_back({{"alpha", pt.alpha},
                      {"n_nodes", pt.n_nodes},
                      {"n_edges", pt.n_edges}});
  }
  out["points"] = std::move(points);
  write_text(rc.io.outdir + "/scan.json", out.dump(2) + "\n");
  std::cout << "scan slope " << run.slope << " (stderr " << run.slope_stderr
            << ") -> " << rc.io.outdir << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"sparse graphs with overlapping communities: simulation, "
               "inference, diagnostics"};
  app.require_subcommand(1);

  CommonArgs args;

  auto add_common = [&](CLI::App* sub, bool seed_required) {
    sub->add_option("--config", args.config_path, "JSON configuration file")
        ->required();
    sub->add_option("--graph", args.graph_path, "edge list path (overrides io.graph)");
    sub->add_option("--traces", args.traces_path, "trace directory (overrides io.traces)");
    sub->add_option("--out", args.outdir, "output directory (overrides io.outdir)");
    auto* seed_opt = sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& v) { args.seed = v; },
        "random seed");
    if (seed_required) seed_opt->required();
  };

  CLI::App* generate = app.add_subcommand("generate", "draw a graph from the model");
  add_common(generate, /*seed_required=*/true);
  CLI::App* fit = app.add_subcommand("fit", "posterior sampling on an observed graph");
  add_common(fit, /*seed_required=*/true);
  CLI::App* predict = app.add_subcommand("predict", "posterior predictive statistics");
  add_common(predict, /*seed_required=*/false);
  CLI::App* report = app.add_subcommand("report", "point estimate, intervals, ordering");
  add_common(report, /*seed_required=*/false);
  CLI::App* scan = app.add_subcommand("scan", "edge growth vs node growth over alpha");
  add_common(scan, /*seed_required=*/false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (generate->parsed()) return run_generate(args);
    if (fit->parsed()) return run_fit(args);
    if (predict->parsed()) return run_predict(args);
    if (report->parsed()) return run_report(args);
    if (scan->parsed()) return run_scan(args);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace ccrm
