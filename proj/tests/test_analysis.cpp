#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ccrm/analysis.hpp"
#include "ccrm/assignment.hpp"

using namespace ccrm;

TEST_CASE("degree summary: empty, triangle, self-loops") {
  SparseGraph empty;
  DegreeSummary s = degree_summary(empty);
  CHECK(s.histogram.empty());
  CHECK(s.clustering == 0.0);

  SparseGraph triangle;
  triangle.n_nodes = 3;
  triangle.edges = {{0, 1}, {0, 2}, {1, 2}};
  s = degree_summary(triangle);
  CHECK(s.degrees[0] == 2);
  CHECK(s.degrees[1] == 2);
  CHECK(s.degrees[2] == 2);
  CHECK(s.clustering == doctest::Approx(1.0));
  CHECK(s.mean == doctest::Approx(2.0));
  CHECK(s.stddev == doctest::Approx(0.0));

  SparseGraph loops;
  loops.n_nodes = 2;
  loops.edges = {{0, 0}, {0, 1}};
  s = degree_summary(loops);
  CHECK(s.degrees[0] == 3);  // self-loop counts twice
  CHECK(s.degrees[1] == 1);
}

TEST_CASE("clustering equals brute-force triple counting on a random graph") {
  Rng rng = make_rng(61);
  SparseGraph g;
  g.n_nodes = 100;
  for (int i = 0; i < 100; ++i) {
    for (int j = i + 1; j < 100; ++j) {
      if (uniform(rng) < 0.1) g.edges.push_back({i, j});
    }
  }
  const DegreeSummary s = degree_summary(g);

  // O(n^3) oracle.
  std::vector<std::vector<char>> adj(100, std::vector<char>(100, 0));
  for (const auto& [i, j] : g.edges) adj[i][j] = adj[j][i] = 1;
  long triangles = 0, triples = 0;
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      for (int k = j + 1; k < 100; ++k) {
        if (i == j || i == k) continue;
        if (adj[i][j] && adj[i][k]) {
          ++triples;
          if (adj[j][k]) ++triangles;  // counts each triangle 3x
        }
      }
    }
  }
  CHECK(s.clustering ==
        doctest::Approx(static_cast<double>(triangles) / triples)
            .epsilon(1e-12));
}

TEST_CASE("log-log fit identities") {
  ScalingRun run;
  for (double n : {10.0, 20.0, 40.0, 80.0, 160.0}) {
    run.points.push_back({0.0, n, n * n});
  }
  fit_loglog(run);
  CHECK(run.slope == doctest::Approx(2.0).epsilon(1e-12));

  ScalingRun power;
  for (double n : {10.0, 30.0, 90.0, 270.0}) {
    power.points.push_back({0.0, n, 3.7 * std::pow(n, 1.234)});
  }
  fit_loglog(power);
  CHECK(power.slope == doctest::Approx(1.234).epsilon(1e-10));
  CHECK(power.intercept == doctest::Approx(std::log(3.7)).epsilon(1e-10));

  ScalingRun degenerate;
  degenerate.points.push_back({1.0, 0.0, 0.0});
  degenerate.points.push_back({2.0, 10.0, 5.0});
  CHECK_THROWS_AS(fit_loglog(degenerate), std::invalid_argument);
}

TEST_CASE("assignment cost: identity, p=1, symmetry, permutation invariance") {
  Rng rng = make_rng(62);
  Eigen::MatrixXd w = Eigen::MatrixXd::NullaryExpr(
      8, 3, [&]() { return uniform(rng); });
  Eigen::VectorXd ws = Eigen::VectorXd::NullaryExpr(
      3, [&]() { return uniform(rng); });
  auto [zero_cost, perm] = assignment_cost(w, w, ws, ws);
  CHECK(zero_cost == 0.0);

  Eigen::MatrixXd w2 = Eigen::MatrixXd::NullaryExpr(
      8, 3, [&]() { return uniform(rng); });
  Eigen::VectorXd ws2 = Eigen::VectorXd::NullaryExpr(
      3, [&]() { return uniform(rng); });
  const double ab = assignment_cost(w, w2, ws, ws2).first;
  const double ba = assignment_cost(w2, w, ws2, ws).first;
  CHECK(ab == doctest::Approx(ba).epsilon(1e-12));

  // Permuting the columns of one argument leaves the cost unchanged.
  Eigen::MatrixXd w2_perm(8, 3);
  w2_perm << w2.col(2), w2.col(0), w2.col(1);
  Eigen::VectorXd ws2_perm(3);
  ws2_perm << ws2[2], ws2[0], ws2[1];
  CHECK(assignment_cost(w, w2_perm, ws, ws2_perm).first ==
        doctest::Approx(ab).epsilon(1e-12));

  // p = 1: no permutation freedom.
  Eigen::MatrixXd a1 = w.col(0);
  Eigen::MatrixXd b1 = w2.col(0);
  Eigen::VectorXd sa(1), sb(1);
  sa << 0.4;
  sb << 0.9;
  CHECK(assignment_cost(a1, b1, sa, sb).first ==
        doctest::Approx((a1 - b1).cwiseAbs().sum() + 0.5).epsilon(1e-12));

  CHECK_THROWS_AS(assignment_cost(w, w2.leftCols(2), ws, ws2),
                  std::invalid_argument);
}

TEST_CASE("assignment equals exhaustive search on random instances") {
  Rng rng = make_rng(63);
  for (int trial = 0; trial < 100; ++trial) {
    const int p = 5;
    Eigen::MatrixXd w_a = Eigen::MatrixXd::NullaryExpr(
        10, p, [&]() { return 2.0 * uniform(rng); });
    Eigen::MatrixXd w_b = Eigen::MatrixXd::NullaryExpr(
        10, p, [&]() { return 2.0 * uniform(rng); });
    Eigen::VectorXd ws_a = Eigen::VectorXd::NullaryExpr(
        p, [&]() { return uniform(rng); });
    Eigen::VectorXd ws_b = Eigen::VectorXd::NullaryExpr(
        p, [&]() { return uniform(rng); });
    const double hungarian = assignment_cost(w_a, w_b, ws_a, ws_b).first;

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
    CHECK(hungarian == doctest::Approx(best).epsilon(1e-12));
  }
}

namespace {
Trace trace_with_snapshots(const std::vector<Eigen::MatrixXd>& ws,
                           const std::vector<Eigen::VectorXd>& stars) {
  Trace t;
  t.p = static_cast<int>(ws.front().cols());
  t.n_nodes = ws.front().rows();
  for (std::size_t i = 0; i < ws.size(); ++i) {
    t.snapshots.push_back(
        {static_cast<long>(100 * (i + 1)), ws[i], stars[i]});
    TraceRecord rec;
    rec.iter = static_cast<long>(100 * (i + 1));
    rec.a = Eigen::VectorXd::Ones(t.p);
    rec.b = Eigen::VectorXd::Ones(t.p);
    rec.w_star = stars[i];
    t.records.push_back(rec);
  }
  return t;
}
}  // namespace

TEST_CASE("point estimate: identical samples, two-sample tie, dominance") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(4, 2, 0.5);
  Eigen::VectorXd ws = Eigen::VectorXd::Constant(2, 0.1);
  std::vector<Trace> traces{trace_with_snapshots({w, w, w}, {ws, ws, ws})};
  PointEstimate est = bayes_point_estimate(traces, 0, 10);
  CHECK(est.risk == 0.0);
  CHECK(est.source_index == 0);

  // Two distinct samples: symmetric cross-cost, tie broken by lower index.
  Eigen::MatrixXd w2 = w;
  w2(0, 0) += 1.0;
  traces = {trace_with_snapshots({w, w2}, {ws, ws})};
  est = bayes_point_estimate(traces, 0, 10);
  CHECK(est.source_index == 0);
  CHECK(est.w_hat == w);

  // Risk of the returned estimate never exceeds other candidates' risk.
  Rng rng = make_rng(64);
  std::vector<Eigen::MatrixXd> wlist;
  std::vector<Eigen::VectorXd> slist;
  for (int i = 0; i < 20; ++i) {
    wlist.push_back(Eigen::MatrixXd::NullaryExpr(
        4, 2, [&]() { return uniform(rng); }));
    slist.push_back(Eigen::VectorXd::NullaryExpr(
        2, [&]() { return uniform(rng); }));
  }
  traces = {trace_with_snapshots(wlist, slist)};
  est = bayes_point_estimate(traces, 0, 20);
  for (int i = 0; i < 20; ++i) {
    double risk = 0.0;
    for (int j = 0; j < 20; ++j) {
      risk += assignment_cost(wlist[j], wlist[i], slist[j], slist[i]).first;
    }
    risk /= 20.0;
    CHECK(est.risk <= risk + 1e-12);
  }
}

TEST_CASE("community reorder: p=1 ordering, planted blocks, scale invariance") {
  SparseGraph g;
  g.n_nodes = 4;

  PointEstimate est;
  est.w_hat.resize(4, 1);
  est.w_hat << 0.3, 1.5, 0.7, 0.1;
  est.w_star_hat = Eigen::VectorXd::Zero(1);
  CHECK(community_reorder(g, est) == std::vector<int>{1, 2, 0, 3});

  // Two well-separated blocks with disjoint supports come out contiguous.
  PointEstimate blocks;
  blocks.w_hat.resize(6, 2);
  blocks.w_hat << 0.9, 0.0, 0.0, 0.8, 0.7, 0.0, 0.0, 0.6, 0.5, 0.0, 0.0, 0.4;
  blocks.w_star_hat = Eigen::VectorXd::Zero(2);
  SparseGraph g6;
  g6.n_nodes = 6;
  const std::vector<int> order = community_reorder(g6, blocks);
  CHECK(order == std::vector<int>{0, 2, 4, 1, 3, 5});

  // argmax assignment is invariant to a global positive rescale.
  PointEstimate scaled = blocks;
  scaled.w_hat *= 17.0;
  CHECK(community_reorder(g6, scaled) == order);
}

TEST_CASE("credible intervals: constant trace, nesting") {
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(3, 2, 0.25);
  Eigen::VectorXd ws = Eigen::VectorXd::Constant(2, 0.1);
  std::vector<Trace> traces{trace_with_snapshots({w, w, w, w}, {ws, ws, ws, ws})};
  SparseGraph g;
  g.n_nodes = 3;
  g.edges = {{0, 1}, {1, 2}};
  auto intervals =
      credible_intervals(traces, 0, g, NodeSelector::kAll, 0.95);
  REQUIRE(intervals.size() == 3);
  for (const auto& ci : intervals) {
    CHECK(ci.lower == doctest::Approx(0.25));
    CHECK(ci.upper == doctest::Approx(0.25));
  }

  Rng rng = make_rng(65);
  std::vector<Eigen::MatrixXd> wlist;
  std::vector<Eigen::VectorXd> slist;
  for (int i = 0; i < 200; ++i) {
    wlist.push_back(Eigen::MatrixXd::NullaryExpr(
        3, 2, [&]() { return uniform(rng); }));
    slist.push_back(ws);
  }
  traces = {trace_with_snapshots(wlist, slist)};
  auto wide = credible_intervals(traces, 0, g, NodeSelector::kAll, 0.95);
  auto narrow = credible_intervals(traces, 0, g, NodeSelector::kAll, 0.5);
  for (std::size_t i = 0; i < wide.size(); ++i) {
    CHECK(wide[i].lower <= narrow[i].lower + 1e-12);
    CHECK(narrow[i].upper <= wide[i].upper + 1e-12);
  }
}

TEST_CASE("sparsity scan wiring produces a sane dense-regime slope") {
  // Finite-activity parameters, small grid: near-quadratic growth.
  CcrmParams params = CcrmParams::symmetric(2, GgpParams(-0.5, 1.0), 0.2, 0.5);
  ScalingRun run = sparsity_scan(params, {20, 40, 80, 160}, 3, 99);
  CHECK(run.points.size() == 4);
  CHECK(run.slope > 1.4);
  CHECK(run.slope < 2.6);
  CHECK_THROWS_AS(sparsity_scan(params, {10, 20, 40}, 3, 1),
                  std::invalid_argument);
}
