#include "ccrm/thinning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ccrm/levy.hpp"

namespace ccrm {

namespace {

// Exact draw for finite-activity parameters: the normalized base density is
// Gamma(-sigma, tau), so the process is compound Poisson and each candidate
// is kept with probability tilt(w)/tilt_max.
JumpSet sample_finite_activity(const GgpParams& params,
                               const std::function<double(double)>& tilt,
                               double tilt_max, double rate_scale,
                               double epsilon, Rng& rng) {
  JumpSet out;
  out.rate_scale = rate_scale;
  out.epsilon = epsilon;
  const double mass = rate_scale * tilt_max * total_levy_mass(params);
  const long n = poisson(mass, rng);
  std::vector<double> jumps;
  jumps.reserve(n);
  for (long i = 0; i < n; ++i) {
    const double w = gamma(-params.sigma, params.tau, rng);
    ++out.proposals;
    const double h = tilt(w);
    if (h > tilt_max * (1.0 + 1e-12)) {
      throw std::runtime_error(
          "sample_tilted_ggp: tilt exceeded its certified bound");
    }
    if (uniform(rng) * tilt_max <= h && w >= epsilon) {
      jumps.push_back(w);
      ++out.accepted;
    }
  }
  std::sort(jumps.begin(), jumps.end());
  out.jumps = Eigen::Map<Eigen::VectorXd>(jumps.data(), jumps.size());
  return out;
}

}  // namespace

JumpSet sample_tilted_ggp(const GgpParams& params,
                          const std::function<double(double)>& tilt,
                          double tilt_max, double rate_scale, double epsilon,
                          Rng& rng) {
  if (!(rate_scale > 0.0)) {
    throw std::invalid_argument("sample_tilted_ggp: rate_scale must be > 0");
  }
  if (!(tilt_max > 0.0)) {
    throw std::invalid_argument("sample_tilted_ggp: tilt_max must be > 0");
  }
  if (params.infinite_activity() && !(epsilon > 0.0)) {
    throw std::invalid_argument(
        "sample_tilted_ggp: epsilon must be > 0 for infinite-activity "
        "parameters");
  }
  if (epsilon < 0.0) {
    throw std::invalid_argument("sample_tilted_ggp: epsilon must be >= 0");
  }

  const double sigma = params.sigma;
  const double tau = params.tau;

  // The adaptive envelope requires w^{-1-sigma} non-increasing; outside that
  // range (and for epsilon = 0) the exact compound-Poisson branch applies.
  if (sigma < 0.0 && (epsilon == 0.0 || sigma <= -1.0)) {
    const double mass = rate_scale * tilt_max * total_levy_mass(params);
    if (mass <= 1e5) {
      return sample_finite_activity(params, tilt, tilt_max, rate_scale,
                                    epsilon, rng);
    }
    if (sigma <= -1.0) {
      throw std::runtime_error(
          "sample_tilted_ggp: expected jump count exceeds the sampling cap");
    }
    // sigma just below 0: the process is almost infinite-activity and the
    // candidate count above blows up like 1/|sigma|. Thin from 1e-6 instead;
    // the jumps below that level carry O(1e-6) of the total mass.
    epsilon = std::max(epsilon, 1e-6);
  }

  JumpSet out;
  out.rate_scale = rate_scale;
  out.epsilon = epsilon;
  const double c = rate_scale / std::tgamma(1.0 - sigma);
  std::vector<double> jumps;

  double t = epsilon;
  double h_t = tilt(t);
  for (;;) {
    if (!(h_t > 0.0)) break;  // tilt vanished; no further jumps possible
    const double r = exponential(rng);
    double t_next;
    if (tau > 0.0) {
      const double scale = c * h_t * std::pow(t, -1.0 - sigma);
      const double g_total = scale * std::exp(-tau * t) / tau;
      if (r >= g_total) break;
      const double u = std::exp(-tau * t) - r * tau / scale;
      if (!(u > 0.0)) break;
      t_next = -std::log(u) / tau;
    } else {
      // sigma in (0,1): power-law envelope.
      const double g_total = c * h_t * std::pow(t, -sigma) / sigma;
      if (r >= g_total) break;
      const double base = std::pow(t, -sigma) - r * sigma / (c * h_t);
      if (!(base > 0.0)) break;
      t_next = std::pow(base, -1.0 / sigma);
    }
    ++out.proposals;
    const double h_next = tilt(t_next);
    double accept_prob = h_next / h_t;
    if (tau > 0.0) {
      accept_prob *= std::pow(t_next / t, -1.0 - sigma);
    }
    if (accept_prob > 1.0 + 1e-9) {
      throw std::runtime_error(
          "sample_tilted_ggp: envelope violated; tilt is not non-increasing");
    }
    if (uniform(rng) <= accept_prob) {
      jumps.push_back(t_next);
      ++out.accepted;
    }
    t = t_next;
    h_t = h_next;
  }

  std::sort(jumps.begin(), jumps.end());
  out.jumps = Eigen::Map<Eigen::VectorXd>(jumps.data(), jumps.size());
  return out;
}

}  // namespace ccrm
