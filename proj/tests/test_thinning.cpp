#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ccrm/atoms.hpp"
#include "ccrm/levy.hpp"
#include "ccrm/quadrature.hpp"
#include "ccrm/scores.hpp"
#include "ccrm/thinning.hpp"

using namespace ccrm;

namespace {
const std::function<double(double)> kFlat = [](double) { return 1.0; };
}

TEST_CASE("jumps respect the truncation level") {
  Rng rng = make_rng(1);
  GgpParams params(0.5, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    JumpSet jumps = sample_tilted_ggp(params, kFlat, 1.0, 50.0, 0.02, rng);
    CHECK((jumps.jumps.array() >= 0.02).all());
  }
  CHECK_THROWS_AS(sample_tilted_ggp(params, kFlat, 1.0, 50.0, 0.0, rng),
                  std::invalid_argument);
}

TEST_CASE("increasing tilt violates the envelope and is detected") {
  Rng rng = make_rng(2);
  // tau = 0: the acceptance probability is exactly h(t')/h(t), so any
  // increasing h trips the check at the first acceptance test.
  GgpParams stable(0.5, 0.0);
  auto increasing = [](double w) { return std::min(1.0, 0.3 + w); };
  CHECK_THROWS_AS(sample_tilted_ggp(stable, increasing, 1.0, 100.0, 0.05, rng),
                  std::runtime_error);
  // tau > 0: h growing faster than w^{1+sigma} beats the envelope too.
  GgpParams params(0.5, 1.0);
  auto quadratic = [](double w) { return std::min(1.0, w * w * 1e4); };
  bool threw = false;
  for (int rep = 0; rep < 20 && !threw; ++rep) {
    try {
      sample_tilted_ggp(params, quadratic, 1.0, 200.0, 1e-3, rng);
    } catch (const std::runtime_error&) {
      threw = true;
    }
  }
  CHECK(threw);
}

TEST_CASE("jump counts above x are Poisson with the tail-integral mean") {
  GgpParams params(0.5, 1.0);
  const double rate = 100.0;
  const double eps = 0.01;
  const std::vector<double> xs{0.01, 0.1, 1.0};
  std::vector<double> sums(xs.size(), 0.0), sq_sums(xs.size(), 0.0);
  const int reps = 10000;
  Rng rng = make_rng(3);
  for (int rep = 0; rep < reps; ++rep) {
    JumpSet jumps = sample_tilted_ggp(params, kFlat, 1.0, rate, eps, rng);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double count =
          (jumps.jumps.array() >= xs[i]).cast<double>().sum();
      sums[i] += count;
      sq_sums[i] += count * count;
    }
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double mean = sums[i] / reps;
    const double var = sq_sums[i] / reps - mean * mean;
    const double se = std::sqrt(var / reps);
    const double expected = rate * tail_levy_intensity(xs[i], params);
    CHECK(std::abs(mean - expected) < 3.0 * se + 1e-9);
    // Poisson: variance tracks the mean.
    CHECK(var == doctest::Approx(expected).epsilon(0.1));
  }
}

TEST_CASE("empirical jump law matches the normalized tail (KS)") {
  GgpParams params(0.5, 1.0);
  const double eps = 0.01;
  const double tail_eps = tail_levy_intensity(eps, params);
  const double rate = 1.05e5 / tail_eps;  // about 1e5 jumps in one draw
  Rng rng = make_rng(4);
  JumpSet jumps = sample_tilted_ggp(params, kFlat, 1.0, rate, eps, rng);
  REQUIRE(jumps.jumps.size() > 50000);
  const long n = jumps.jumps.size();
  double ks = 0.0;
  for (long i = 0; i < n; ++i) {
    const double cdf = 1.0 - tail_levy_intensity(jumps.jumps[i], params) / tail_eps;
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    ks = std::max(ks, std::max(std::abs(cdf - lo), std::abs(cdf - hi)));
  }
  CHECK(ks < 0.02);
}

TEST_CASE("counts in disjoint intervals are uncorrelated") {
  GgpParams params(0.5, 1.0);
  const int reps = 10000;
  Rng rng = make_rng(5);
  std::vector<double> a(reps), b(reps);
  for (int rep = 0; rep < reps; ++rep) {
    JumpSet jumps = sample_tilted_ggp(params, kFlat, 1.0, 30.0, 0.05, rng);
    a[rep] = ((jumps.jumps.array() >= 0.05) && (jumps.jumps.array() < 0.2))
                 .cast<double>()
                 .sum();
    b[rep] = ((jumps.jumps.array() >= 0.5) && (jumps.jumps.array() < 2.0))
                 .cast<double>()
                 .sum();
  }
  double ma = 0.0, mb = 0.0;
  for (int i = 0; i < reps; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= reps;
  mb /= reps;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (int i = 0; i < reps; ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  const double corr = cov / std::sqrt(va * vb);
  CHECK(std::abs(corr) < 4.0 / std::sqrt(static_cast<double>(reps)));
}

TEST_CASE("finite-activity exact branch") {
  GgpParams params(-0.5, 1.0);
  Rng rng = make_rng(6);
  const double rate = 20.0;
  const int reps = 5000;
  double sum = 0.0, sq = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    JumpSet jumps = sample_tilted_ggp(params, kFlat, 1.0, rate, 0.0, rng);
    const double n = static_cast<double>(jumps.jumps.size());
    sum += n;
    sq += n * n;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sq / reps - mean * mean) / reps);
  CHECK(std::abs(mean - rate * total_levy_mass(params)) < 3.0 * se);

  // sigma <= -1 with positive epsilon also routes through the exact branch.
  GgpParams very_finite(-1.5, 1.0);
  JumpSet jumps = sample_tilted_ggp(very_finite, kFlat, 1.0, 5.0, 0.1, rng);
  CHECK((jumps.jumps.array() >= 0.1).all());
}

TEST_CASE("atom scores: degenerate mode and gamma means") {
  CcrmParams degen =
      CcrmParams::symmetric(2, GgpParams(0.5, 1.0), 0.2, 0.5, true);
  Rng rng = make_rng(7);
  NodeAtoms atoms = sample_ccrm_atoms(degen, 50.0, 1e-3,
                                      Eigen::VectorXd::Zero(2), rng);
  CHECK(atoms.size() > 0);
  CHECK((atoms.beta.array() == 1.0).all());
  CHECK(atoms.theta.size() == atoms.size());
  CHECK((atoms.theta.array() >= 0.0).all());
  CHECK((atoms.theta.array() <= 50.0).all());

  CcrmParams params = CcrmParams::symmetric(2, GgpParams(0.5, 1.0), 0.2, 0.5);
  double sum = 0.0, sq = 0.0;
  long count = 0;
  while (count < 100000) {
    NodeAtoms batch = sample_ccrm_atoms(params, 100.0, 1e-2,
                                        Eigen::VectorXd::Zero(2), rng, false);
    for (Eigen::Index i = 0; i < batch.size(); ++i) {
      sum += batch.beta(i, 0);
      sq += batch.beta(i, 0) * batch.beta(i, 0);
      ++count;
    }
  }
  const double mean = sum / count;
  const double se = std::sqrt((sq / count - mean * mean) / count);
  CHECK(std::abs(mean - 0.4) < 3.0 * se);
}

TEST_CASE("atom weight totals match the Campbell integral") {
  // gamma tilt active so the mgf factor matters.
  Eigen::VectorXd gamma(2);
  gamma << 0.3, 0.0;
  CcrmParams params(2, GgpParams(0.5, 1.0), Eigen::VectorXd::Constant(2, 0.4),
                    Eigen::VectorXd::Constant(2, 0.8), gamma);
  const double alpha = 30.0;
  const double eps = 1e-3;
  Rng rng = make_rng(8);
  const int reps = 3000;
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(2);
  for (int rep = 0; rep < reps; ++rep) {
    NodeAtoms atoms = sample_ccrm_atoms(params, alpha, eps,
                                        Eigen::VectorXd::Zero(2), rng, false);
    Eigen::VectorXd total = Eigen::VectorXd::Zero(2);
    if (atoms.size() > 0) total = atoms.weights().colwise().sum();
    sums += total;
    sq += total.cwiseProduct(total);
  }
  // Oracle: alpha * int_eps^inf w0 E[beta_k e^{-w0 gamma beta}] rho0(dw0),
  // with E[beta_k e^{-w0 gamma'beta}] = gradM_k(-w0 gamma).
  for (int k = 0; k < 2; ++k) {
    auto oracle = integrate(
        [&](double w) {
          return w * score_mgf_grad_neg(params, w, gamma)[k] *
                 ggp_levy_density(w, params.base);
        },
        eps, 200.0, 1e-10, 1e-14, 4000);
    const double mean = sums[k] / reps;
    const double se =
        std::sqrt((sq[k] / reps - mean * mean) / reps);
    CHECK(std::abs(mean - alpha * oracle.value) < 3.0 * se + 1e-9);
  }
}
