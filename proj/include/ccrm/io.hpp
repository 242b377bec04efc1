#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ccrm/graph.hpp"
#include "ccrm/mcmc.hpp"

namespace ccrm {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse a whitespace-separated "labelA labelB" edge list. Lines whose first
/// non-blank character is '#' are ignored, blank lines are skipped, anything
/// other than exactly two tokens is an error naming the line. Labels map to
/// dense ids by first appearance; duplicate edges collapse; self-loops kept.
SparseGraph load_edge_list(const std::string& path);

/// Inverse of load_edge_list (uses labels when present, ids otherwise).
void save_edge_list(const SparseGraph& graph, const std::string& path);

/// One CSV per chain with header
/// iter,logalpha,sigma,tau,a_1..a_p,b_1..b_p,wstar_1..p,logtarget,acc_hmc,acc_mh
/// plus a weight-snapshot sidecar and a small metadata file. Decimal output
/// uses 17 significant digits so values round-trip exactly.
void save_traces(const std::vector<Trace>& traces, const std::string& dir);
std::vector<Trace> load_traces(const std::string& dir);

struct GenerateConfig {
  double alpha = 100.0;
  double epsilon = -1.0;  // < 0: generation default for the parameters
  std::uint64_t seed = 1;
};

struct ScanConfig {
  std::vector<double> alpha_grid{50, 100, 200, 400, 800};
  int reps = 5;
  double epsilon = -1.0;
  std::uint64_t seed = 1;
};

struct PredictConfig {
  int samples = 500;
  double epsilon = -1.0;
  std::uint64_t seed = 1;
};

struct ReportConfig {
  int point_estimate_samples = 500;
  double credible_level = 0.95;
};

struct IoConfig {
  std::string graph;
  std::string outdir = ".";
  std::string traces;
};

struct RunConfig {
  McmcConfig mcmc;
  GenerateConfig generate;
  ScanConfig scan;
  PredictConfig predict;
  ReportConfig report;
  IoConfig io;
};

/// Strict JSON config: unknown keys anywhere are rejected; violations of
/// downstream preconditions are reported with the offending field named.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

HyperState initial_hyper(const McmcConfig& cfg);

/// Subcommands: generate, fit, predict, report, scan. Exit codes: 0 success,
/// 2 configuration/usage error, 3 runtime error.
int cli_main(int argc, const char* const* argv);

}  // namespace ccrm
