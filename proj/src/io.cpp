#include "ccrm/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace ccrm {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

/// Whole-file atomic write: temp file in the same directory, then rename.
void atomic_write(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

SparseGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);
  SparseGraph graph;
  std::unordered_map<std::string, int> ids;
  std::set<std::pair<int, int>> edges;
  std::string line;
  long line_no = 0;
  auto lookup = [&](const std::string& label) {
    auto [it, inserted] = ids.try_emplace(label, static_cast<int>(ids.size()));
    if (inserted) graph.labels.push_back(label);
    return it->second;
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string a, b, extra;
    if (!(tokens >> a)) continue;  // blank line
    if (a[0] == '#') continue;
    if (!(tokens >> b) || (tokens >> extra)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed edge line (expected 2 tokens)");
    }
    int i = lookup(a);
    int j = lookup(b);
    if (i > j) std::swap(i, j);
    edges.insert({i, j});
  }
  graph.n_nodes = static_cast<int>(ids.size());
  graph.edges.assign(edges.begin(), edges.end());
  return graph;
}

void save_edge_list(const SparseGraph& graph, const std::string& path) {
  std::ostringstream out;
  const bool labeled = !graph.labels.empty();
  for (const auto& [i, j] : graph.edges) {
    if (labeled) {
      out << graph.labels[i] << ' ' << graph.labels[j] << '\n';
    } else {
      out << i << ' ' << j << '\n';
    }
  }
  atomic_write(path, out.str());
}

namespace {

std::string trace_header(int p) {
  std::ostringstream h;
  h << "iter,logalpha,sigma,tau";
  for (int k = 1; k <= p; ++k) h << ",a_" << k;
  for (int k = 1; k <= p; ++k) h << ",b_" << k;
  for (int k = 1; k <= p; ++k) h << ",wstar_" << k;
  h << ",logtarget,acc_hmc,acc_mh";
  return h.str();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

void save_traces(const std::vector<Trace>& traces, const std::string& dir) {
  fs::create_directories(dir);
  json meta;
  meta["chains"] = traces.size();
  meta["p"] = traces.empty() ? 0 : traces.front().p;
  meta["n_nodes"] = traces.empty() ? 0 : traces.front().n_nodes;
  meta["thin"] = traces.empty() ? 1 : traces.front().thin;
  atomic_write(dir + "/trace_meta.json", meta.dump(2) + "\n");

  for (const auto& trace : traces) {
    std::ostringstream out;
    out << trace_header(trace.p) << '\n';
    for (const auto& r : trace.records) {
      out << r.iter << ',' << fmt17(r.log_alpha) << ',' << fmt17(r.sigma)
          << ',' << fmt17(r.tau);
      for (int k = 0; k < trace.p; ++k) out << ',' << fmt17(r.a[k]);
      for (int k = 0; k < trace.p; ++k) out << ',' << fmt17(r.b[k]);
      for (int k = 0; k < trace.p; ++k) out << ',' << fmt17(r.w_star[k]);
      out << ',' << fmt17(r.log_target) << ',' << r.acc_hmc << ',' << r.acc_mh
          << '\n';
    }
    atomic_write(dir + "/trace_chain" + std::to_string(trace.chain_id) + ".csv",
                 out.str());

    std::ostringstream wout;
    wout << "iter";
    for (int k = 1; k <= trace.p; ++k) wout << ",wstar_" << k;
    for (long v = 0; v < trace.n_nodes; ++v) {
      for (int k = 1; k <= trace.p; ++k) wout << ",w_" << v << '_' << k;
    }
    wout << '\n';
    for (const auto& snap : trace.snapshots) {
      wout << snap.iter;
      for (int k = 0; k < trace.p; ++k) wout << ',' << fmt17(snap.w_star[k]);
      for (long v = 0; v < trace.n_nodes; ++v) {
        for (int k = 0; k < trace.p; ++k) wout << ',' << fmt17(snap.w(v, k));
      }
      wout << '\n';
    }
    atomic_write(
        dir + "/weights_chain" + std::to_string(trace.chain_id) + ".csv",
        wout.str());
  }
}

std::vector<Trace> load_traces(const std::string& dir) {
  const json meta = json::parse(read_file(dir + "/trace_meta.json"));
  const int chains = meta.at("chains").get<int>();
  const int p = meta.at("p").get<int>();
  const long n_nodes = meta.at("n_nodes").get<long>();
  const long thin = meta.at("thin").get<long>();

  std::vector<Trace> traces;
  traces.reserve(chains);
  for (int c = 0; c < chains; ++c) {
    Trace trace;
    trace.chain_id = c;
    trace.p = p;
    trace.n_nodes = n_nodes;
    trace.thin = thin;

    std::ifstream in(dir + "/trace_chain" + std::to_string(c) + ".csv");
    if (!in) {
      throw std::runtime_error("missing trace file for chain " +
                               std::to_string(c));
    }
    std::string line;
    std::getline(in, line);
    if (line != trace_header(p)) {
      throw std::runtime_error("trace header mismatch in chain " +
                               std::to_string(c));
    }
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = split_csv(line);
      if (static_cast<int>(f.size()) != 7 + 3 * p) {
        throw std::runtime_error("trace row width mismatch in chain " +
                                 std::to_string(c));
      }
      TraceRecord r;
      std::size_t idx = 0;
      r.iter = std::stol(f[idx++]);
      r.log_alpha = std::stod(f[idx++]);
      r.sigma = std::stod(f[idx++]);
      r.tau = std::stod(f[idx++]);
      r.a.resize(p);
      r.b.resize(p);
      r.w_star.resize(p);
      for (int k = 0; k < p; ++k) r.a[k] = std::stod(f[idx++]);
      for (int k = 0; k < p; ++k) r.b[k] = std::stod(f[idx++]);
      for (int k = 0; k < p; ++k) r.w_star[k] = std::stod(f[idx++]);
      r.log_target = std::stod(f[idx++]);
      r.acc_hmc = std::stoi(f[idx++]);
      r.acc_mh = std::stoi(f[idx++]);
      trace.records.push_back(std::move(r));
    }

    std::ifstream win(dir + "/weights_chain" + std::to_string(c) + ".csv");
    if (win) {
      std::getline(win, line);  // header
      while (std::getline(win, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (static_cast<long>(f.size()) != 1 + p + n_nodes * p) {
          throw std::runtime_error("weight row width mismatch in chain " +
                                   std::to_string(c));
        }
        WeightSnapshot snap;
        std::size_t idx = 0;
        snap.iter = std::stol(f[idx++]);
        snap.w_star.resize(p);
        for (int k = 0; k < p; ++k) snap.w_star[k] = std::stod(f[idx++]);
        snap.w.resize(n_nodes, p);
        for (long v = 0; v < n_nodes; ++v) {
          for (int k = 0; k < p; ++k) snap.w(v, k) = std::stod(f[idx++]);
        }
        trace.snapshots.push_back(std::move(snap));
      }
    }
    traces.push_back(std::move(trace));
  }
  return traces;
}

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + context);
    }
  }
}

double require_positive(const json& j, const std::string& field) {
  const double v = j.get<double>();
  if (!(v > 0.0)) throw ConfigError(field + " must be > 0");
  return v;
}

struct HyperBlock {
  double init;
  bool free_flag;
  GammaPrior prior;
};

HyperBlock parse_hyper_block(const json& j, const std::string& context,
                             double default_init, bool default_free) {
  HyperBlock block{default_init, default_free, GammaPrior{}};
  if (j.is_null()) return block;
  check_keys(j, {"init", "free", "prior"}, context);
  if (j.contains("init")) block.init = j["init"].get<double>();
  if (j.contains("free")) block.free_flag = j["free"].get<bool>();
  if (j.contains("prior")) {
    check_keys(j["prior"], {"shape", "rate"}, context + ".prior");
    if (j["prior"].contains("shape")) {
      block.prior.shape = require_positive(j["prior"]["shape"], context + ".prior.shape");
    }
    if (j["prior"].contains("rate")) {
      block.prior.rate = require_positive(j["prior"]["rate"], context + ".prior.rate");
    }
  }
  return block;
}

}  // namespace

HyperState initial_hyper(const McmcConfig& cfg) {
  HyperState hyper;
  hyper.sigma = cfg.init_sigma;
  hyper.tau = cfg.init_tau;
  hyper.a = Eigen::VectorXd::Constant(cfg.p, cfg.init_a);
  hyper.b = Eigen::VectorXd::Constant(cfg.p, cfg.init_b);
  return hyper;
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& err) {
    throw ConfigError(std::string("invalid JSON: ") + err.what());
  }
  check_keys(root, {"model", "mcmc", "generate", "scan", "predict", "report", "io"},
             "config");
  RunConfig rc;

  if (root.contains("model")) {
    const json& m = root["model"];
    check_keys(m,
               {"p", "gamma", "degenerate_scores", "tie_a", "tie_b", "sigma",
                "tau", "a", "b", "alpha"},
               "model");
    if (m.contains("p")) {
      rc.mcmc.p = m["p"].get<int>();
      if (rc.mcmc.p < 1) throw ConfigError("model.p must be >= 1");
    }
    if (m.contains("gamma")) {
      const auto g = m["gamma"].get<std::vector<double>>();
      if (static_cast<int>(g.size()) != rc.mcmc.p) {
        throw ConfigError("model.gamma must have length model.p");
      }
      rc.mcmc.gamma_tilt =
          Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
      if ((rc.mcmc.gamma_tilt.array() < 0.0).any()) {
        throw ConfigError("model.gamma entries must be >= 0");
      }
    }
    if (m.contains("degenerate_scores")) {
      rc.mcmc.degenerate_scores = m["degenerate_scores"].get<bool>();
    }
    if (m.contains("tie_a")) rc.mcmc.tie_score_shapes = m["tie_a"].get<bool>();
    if (m.contains("tie_b")) rc.mcmc.tie_score_rates = m["tie_b"].get<bool>();

    const HyperBlock sigma = parse_hyper_block(
        m.contains("sigma") ? m["sigma"] : json(), "model.sigma", 0.1, true);
    const HyperBlock tau = parse_hyper_block(
        m.contains("tau") ? m["tau"] : json(), "model.tau", 1.0, true);
    const HyperBlock a = parse_hyper_block(m.contains("a") ? m["a"] : json(),
                                           "model.a", 0.5, true);
    const HyperBlock b = parse_hyper_block(m.contains("b") ? m["b"] : json(),
                                           "model.b", 1.0, false);
    const HyperBlock alpha = parse_hyper_block(
        m.contains("alpha") ? m["alpha"] : json(), "model.alpha", 0.0, true);
    rc.mcmc.init_sigma = sigma.init;
    rc.mcmc.priors.sigma_free = sigma.free_flag;
    rc.mcmc.priors.one_minus_sigma = sigma.prior;
    rc.mcmc.init_tau = tau.init;
    rc.mcmc.priors.tau_free = tau.free_flag;
    rc.mcmc.priors.tau = tau.prior;
    if (!(a.init > 0.0)) throw ConfigError("model.a.init must be > 0");
    if (!(b.init > 0.0)) throw ConfigError("model.b.init must be > 0");
    rc.mcmc.init_a = a.init;
    rc.mcmc.priors.a_free = a.free_flag;
    rc.mcmc.priors.score_shape = a.prior;
    rc.mcmc.init_b = b.init;
    rc.mcmc.priors.b_free = b.free_flag;
    rc.mcmc.priors.score_rate = b.prior;
    rc.mcmc.init_alpha = alpha.init;
    rc.mcmc.priors.alpha_free = alpha.free_flag;
    rc.mcmc.priors.alpha = alpha.prior;
    try {
      GgpParams check(rc.mcmc.init_sigma, rc.mcmc.init_tau);
      (void)check;
    } catch (const std::invalid_argument& err) {
      throw ConfigError(std::string("model.sigma/model.tau: ") + err.what());
    }
    if (rc.mcmc.degenerate_scores &&
        (rc.mcmc.priors.a_free || rc.mcmc.priors.b_free)) {
      throw ConfigError(
          "model.a/model.b cannot be free when degenerate_scores is set");
    }
  }

  if (root.contains("mcmc")) {
    const json& m = root["mcmc"];
    check_keys(m,
               {"iters", "burnin", "init_iters", "chains", "thin",
                "leapfrog_steps", "mass_epsilon", "adapt_fraction",
                "weight_stride", "seed", "parallel_chains", "init_hmc_step",
                "init_rw_step"},
               "mcmc");
    auto get_long = [&](const char* key, long def, long min_value) {
      if (!m.contains(key)) return def;
      const long v = m[key].get<long>();
      if (v < min_value) {
        throw ConfigError(std::string("mcmc.") + key + " must be >= " +
                          std::to_string(min_value));
      }
      return v;
    };
    rc.mcmc.iters = get_long("iters", rc.mcmc.iters, 1);
    rc.mcmc.burnin = get_long("burnin", rc.mcmc.burnin, 0);
    rc.mcmc.init_iters = get_long("init_iters", rc.mcmc.init_iters, 0);
    rc.mcmc.chains = static_cast<int>(get_long("chains", rc.mcmc.chains, 1));
    rc.mcmc.thin = get_long("thin", rc.mcmc.thin, 1);
    rc.mcmc.leapfrog_steps =
        static_cast<int>(get_long("leapfrog_steps", rc.mcmc.leapfrog_steps, 1));
    rc.mcmc.weight_stride = get_long("weight_stride", rc.mcmc.weight_stride, 0);
    if (m.contains("mass_epsilon")) {
      rc.mcmc.mass_epsilon = require_positive(m["mass_epsilon"], "mcmc.mass_epsilon");
    }
    if (m.contains("adapt_fraction")) {
      rc.mcmc.adapt_fraction = m["adapt_fraction"].get<double>();
      if (rc.mcmc.adapt_fraction < 0.0 || rc.mcmc.adapt_fraction > 1.0) {
        throw ConfigError("mcmc.adapt_fraction must be in [0,1]");
      }
    }
    if (m.contains("seed")) rc.mcmc.seed = m["seed"].get<std::uint64_t>();
    if (m.contains("parallel_chains")) {
      rc.mcmc.parallel_chains = m["parallel_chains"].get<bool>();
    }
    if (m.contains("init_hmc_step")) {
      rc.mcmc.init_hmc_step = require_positive(m["init_hmc_step"], "mcmc.init_hmc_step");
    }
    if (m.contains("init_rw_step")) {
      rc.mcmc.init_rw_step = require_positive(m["init_rw_step"], "mcmc.init_rw_step");
    }
  }

  if (root.contains("generate")) {
    const json& g = root["generate"];
    check_keys(g, {"alpha", "epsilon", "seed"}, "generate");
    if (g.contains("alpha")) {
      rc.generate.alpha = g["alpha"].get<double>();
      if (rc.generate.alpha < 0.0) throw ConfigError("generate.alpha must be >= 0");
    }
    if (g.contains("epsilon")) rc.generate.epsilon = g["epsilon"].get<double>();
    if (g.contains("seed")) rc.generate.seed = g["seed"].get<std::uint64_t>();
  }

  if (root.contains("scan")) {
    const json& s = root["scan"];
    check_keys(s, {"alpha_grid", "reps", "epsilon", "seed"}, "scan");
    if (s.contains("alpha_grid")) {
      rc.scan.alpha_grid = s["alpha_grid"].get<std::vector<double>>();
      if (rc.scan.alpha_grid.size() < 4) {
        throw ConfigError("scan.alpha_grid needs at least 4 points");
      }
      for (double a : rc.scan.alpha_grid) {
        if (!(a > 0.0)) throw ConfigError("scan.alpha_grid entries must be > 0");
      }
    }
    if (s.contains("reps")) {
      rc.scan.reps = s["reps"].get<int>();
      if (rc.scan.reps < 1) throw ConfigError("scan.reps must be >= 1");
    }
    if (s.contains("epsilon")) rc.scan.epsilon = s["epsilon"].get<double>();
    if (s.contains("seed")) rc.scan.seed = s["seed"].get<std::uint64_t>();
  }

  if (root.contains("predict")) {
    const json& p = root["predict"];
    check_keys(p, {"samples", "epsilon", "seed"}, "predict");
    if (p.contains("samples")) {
      rc.predict.samples = p["samples"].get<int>();
      if (rc.predict.samples < 1) throw ConfigError("predict.samples must be >= 1");
    }
    if (p.contains("epsilon")) rc.predict.epsilon = p["epsilon"].get<double>();
    if (p.contains("seed")) rc.predict.seed = p["seed"].get<std::uint64_t>();
  }

  if (root.contains("report")) {
    const json& r = root["report"];
    check_keys(r, {"point_estimate_samples", "credible_level"}, "report");
    if (r.contains("point_estimate_samples")) {
      rc.report.point_estimate_samples = r["point_estimate_samples"].get<int>();
      if (rc.report.point_estimate_samples < 2) {
        throw ConfigError("report.point_estimate_samples must be >= 2");
      }
    }
    if (r.contains("credible_level")) {
      rc.report.credible_level = r["credible_level"].get<double>();
      if (!(rc.report.credible_level > 0.0 && rc.report.credible_level < 1.0)) {
        throw ConfigError("report.credible_level must be in (0,1)");
      }
    }
  }

  if (root.contains("io")) {
    const json& io = root["io"];
    check_keys(io, {"graph", "outdir", "traces"}, "io");
    if (io.contains("graph")) rc.io.graph = io["graph"].get<std::string>();
    if (io.contains("outdir")) rc.io.outdir = io["outdir"].get<std::string>();
    if (io.contains("traces")) rc.io.traces = io["traces"].get<std::string>();
  }

  try {
    rc.mcmc.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
  return rc;
}

RunConfig load_config(const std::string& path) {
  return parse_config(read_file(path));
}

}  // namespace ccrm
